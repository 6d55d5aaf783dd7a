#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace testing_support {

namespace fs = std::filesystem;

fs::path data_dir() { return FAIRWRITE_DATA_DIR; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("fairwrite-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

std::vector<double> gaussian_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  do {
    for (double& x : v) x = normal(rng);
  } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
  return v;
}

namespace {

// With `ties`, roughly one vector in four repeats an earlier one from `pool`.
std::vector<double> maybe_repeat(std::vector<std::vector<double>>& pool, std::size_t dim,
                                 std::mt19937_64& rng, bool ties) {
  if (ties && !pool.empty() && rng() % 4 == 0) return pool[rng() % pool.size()];
  pool.push_back(gaussian_vector(dim, rng));
  return pool.back();
}

}  // namespace

MapEmbedder::MapEmbedder(std::size_t dim, std::map<std::string, fairwrite::Embedding> table,
                         std::set<std::string> failing)
    : dim_(dim), table_(std::move(table)), failing_(std::move(failing)) {}

std::vector<fairwrite::Embedding> MapEmbedder::embed(
    std::span<const fairwrite::EmbeddingRequest> requests) {
  std::vector<fairwrite::Embedding> out;
  for (const auto& request : requests) {
    {
      std::lock_guard lock(mutex_);
      seen_.push_back(request.text);
    }
    if (failing_.contains(request.text)) {
      throw fairwrite::ProviderError("scripted failure for \"" + request.text + "\"", true);
    }
    auto it = table_.find(request.text);
    if (it == table_.end()) throw fairwrite::NotFound("no vector for \"" + request.text + "\"");
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> MapEmbedder::seen() const {
  std::lock_guard lock(mutex_);
  return seen_;
}

fairwrite::Lexicon axis_lexicon() {
  using namespace fairwrite;
  SensitiveAttribute gender{"gender",
                            {{"male", "This is about men", Embedding{1.0, 0.0, 0.0}},
                             {"female", "This is about women", Embedding{0.0, 1.0, 0.0}}}};
  std::vector<LexiconEntry> entries{
      {"bossy", "This is bossy", Polarity::kUnpleasant, "male", Embedding{1.0, 0.0, 0.2}},
      {"loud", "This is loud", Polarity::kUnpleasant, "male", Embedding{1.0, 0.0, -0.5}},
      {"caring", "This is caring", Polarity::kPleasant, "male", Embedding{0.0, 0.0, -1.0}},
      {"fair", "This is fair", Polarity::kPleasant, "male", Embedding{-1.0, 0.0, 0.0}},
      {"weak", "This is weak", Polarity::kUnpleasant, "female", Embedding{0.0, 1.0, 0.2}},
      {"strong", "This is strong", Polarity::kPleasant, "female", Embedding{0.0, -1.0, 0.0}},
  };
  return Lexicon("m", 3, "This is {}", {gender}, entries);
}

RandomLexicon random_lexicon(std::mt19937_64& rng, std::size_t dim, std::size_t groups,
                             std::size_t words, bool ties) {
  using namespace fairwrite;
  std::vector<std::vector<double>> group_vectors, unpleasant_pool, pleasant_pool, group_pool;
  std::vector<std::vector<std::vector<double>>> unpleasant(groups), pleasant(groups);
  SensitiveAttribute attribute{"attr", {}};
  std::vector<LexiconEntry> entries;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::string id = "g" + std::to_string(g);
    group_vectors.push_back(maybe_repeat(group_pool, dim, rng, ties));
    attribute.groups.push_back({id, "This is " + id, Embedding(group_vectors.back())});
    // Word pools are per group so that ties stay within one argmax scan.
    unpleasant_pool.clear();
    pleasant_pool.clear();
    for (std::size_t w = 0; w < words; ++w) {
      unpleasant[g].push_back(maybe_repeat(unpleasant_pool, dim, rng, ties));
      const std::string word = id + "_neg" + std::to_string(w);
      entries.push_back({word, "This is " + word, Polarity::kUnpleasant, id,
                         Embedding(unpleasant[g].back())});
    }
    for (std::size_t w = 0; w < words; ++w) {
      pleasant[g].push_back(maybe_repeat(pleasant_pool, dim, rng, ties));
      const std::string word = id + "_pos" + std::to_string(w);
      entries.push_back({word, "This is " + word, Polarity::kPleasant, id,
                         Embedding(pleasant[g].back())});
    }
  }
  Lexicon lexicon("test-model", dim, "This is {}", {attribute}, std::move(entries));
  return {std::move(group_vectors), std::move(unpleasant), std::move(pleasant), std::move(lexicon)};
}

}  // namespace testing_support
