#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fairwrite/lexicon.hpp"
#include "fairwrite/providers/embedding.hpp"

namespace testing_support {

/// data/ directory of the source tree.
std::filesystem::path data_dir();
inline std::filesystem::path hermetic_dir() { return data_dir() / "hermetic"; }

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& contents);

std::vector<double> gaussian_vector(std::size_t dim, std::mt19937_64& rng);

/// Attribute "gender" with groups male = +x and female = +y in 3-d. T- words
/// sit near their group; T+ words point elsewhere. Male: bossy, loud / caring,
/// fair. Female: weak / strong.
fairwrite::Lexicon axis_lexicon();

/// Text -> vector lookup ignoring instructions. Texts in `failing` raise a
/// ProviderError, unknown texts a NotFound.
class MapEmbedder : public fairwrite::Embedder {
 public:
  MapEmbedder(std::size_t dim, std::map<std::string, fairwrite::Embedding> table,
              std::set<std::string> failing = {});
  std::vector<fairwrite::Embedding> embed(
      std::span<const fairwrite::EmbeddingRequest> requests) override;
  const std::string& model_id() const override { return model_id_; }
  std::size_t dim() const override { return dim_; }
  std::vector<std::string> seen() const;

 private:
  std::size_t dim_;
  std::map<std::string, fairwrite::Embedding> table_;
  std::set<std::string> failing_;
  std::string model_id_ = "m";
  mutable std::mutex mutex_;
  std::vector<std::string> seen_;
};

/// One attribute "attr" with `groups` groups ("g0", "g1", ...), each with
/// `words` unpleasant ("g0_neg0") and `words` pleasant ("g0_pos0") entries.
/// With `ties`, some vectors are exact copies of earlier ones so that argmax
/// ties occur. Raw vectors are kept alongside for oracle checks.
struct RandomLexicon {
  std::vector<std::vector<double>> group_vectors;
  std::vector<std::vector<std::vector<double>>> unpleasant;  // [group][word]
  std::vector<std::vector<std::vector<double>>> pleasant;
  fairwrite::Lexicon lexicon;
};

RandomLexicon random_lexicon(std::mt19937_64& rng, std::size_t dim, std::size_t groups,
                             std::size_t words, bool ties);

}  // namespace testing_support
