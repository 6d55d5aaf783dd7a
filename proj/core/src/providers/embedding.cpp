#include "fairwrite/providers/embedding.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fairwrite/errors.hpp"
#include "fairwrite/providers/fixture_format.hpp"

namespace fairwrite {

Embedding Embedder::embed_one(std::string text, std::string instruction) {
  const EmbeddingRequest request{std::move(text), std::move(instruction)};
  auto out = embed(std::span<const EmbeddingRequest>(&request, 1));
  if (out.size() != 1) {
    throw ProviderError("embedder returned " + std::to_string(out.size()) + " vectors for 1 request");
  }
  return std::move(out.front());
}

FixtureEmbedder::FixtureEmbedder(const std::filesystem::path& path) {
  FixtureFile file = read_fixture_file(path, /*strict=*/true);
  model_id_ = std::move(file.manifest.model_id);
  dim_ = file.manifest.dim;
  for (auto& record : file.records) {
    vectors_.insert_or_assign(std::move(record.key), Embedding(std::move(record.vector)));
  }
}

std::vector<Embedding> FixtureEmbedder::embed(std::span<const EmbeddingRequest> requests) {
  std::vector<Embedding> out;
  out.reserve(requests.size());
  for (const auto& request : requests) {
    if (request.text.empty()) throw InvalidArgument("cannot embed empty text");
    lookups_.fetch_add(1, std::memory_order_relaxed);
    auto it = vectors_.find(embedding_key(model_id_, request.instruction, request.text));
    if (it == vectors_.end()) {
      throw NotFound("no fixture embedding for text \"" + request.text + "\"" +
                     (request.instruction.empty() ? "" : " (instruction \"" + request.instruction + "\")"));
    }
    out.push_back(it->second);
  }
  return out;
}

SyntheticEmbedder::SyntheticEmbedder(std::size_t dim, std::uint64_t seed, std::string model_id)
    : dim_(dim), seed_(seed), model_id_(std::move(model_id)) {
  if (dim_ == 0) throw ConfigError("synthetic embedder dim must be >= 1");
}

std::vector<Embedding> SyntheticEmbedder::embed(std::span<const EmbeddingRequest> requests) {
  calls_.fetch_add(1, std::memory_order_relaxed);
  std::vector<Embedding> out;
  out.reserve(requests.size());
  for (const auto& request : requests) {
    if (request.text.empty()) throw InvalidArgument("cannot embed empty text");
    // The key digest is platform-independent; mt19937_64 is fully specified
    // by the standard, and the Box-Muller transform below avoids the
    // implementation-defined std::normal_distribution.
    const std::string digest = embedding_key(model_id_ + "#" + std::to_string(seed_),
                                             request.instruction, request.text);
    std::seed_seq seq(digest.begin(), digest.end());
    std::mt19937_64 engine(seq);
    auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };

    std::vector<double> values(dim_);
    for (std::size_t i = 0; i < dim_; i += 2) {
      const double radius = std::sqrt(-2.0 * std::log(uniform()));
      const double angle = 2.0 * std::numbers::pi * uniform();
      values[i] = radius * std::cos(angle);
      if (i + 1 < dim_) values[i + 1] = radius * std::sin(angle);
    }
    out.push_back(normalize(Embedding(std::move(values))));
  }
  return out;
}

}  // namespace fairwrite
