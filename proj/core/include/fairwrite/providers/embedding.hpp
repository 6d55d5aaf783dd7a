#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairwrite/geometry.hpp"

namespace fairwrite {

/// One text to embed. Instruction-tuned embedders take a task instruction
/// alongside the text; an empty instruction means none.
struct EmbeddingRequest {
  std::string text;
  std::string instruction;
};

class Embedder {
 public:
  virtual ~Embedder() = default;

  /// One vector per request, in request order. Every vector has dim().
  virtual std::vector<Embedding> embed(std::span<const EmbeddingRequest> requests) = 0;

  virtual const std::string& model_id() const = 0;
  virtual std::size_t dim() const = 0;

  Embedding embed_one(std::string text, std::string instruction = {});
};

/// Serves vectors from a fixture file (manifest line + one record per line).
/// Misses are hard errors naming the text.
class FixtureEmbedder : public Embedder {
 public:
  explicit FixtureEmbedder(const std::filesystem::path& path);

  std::vector<Embedding> embed(std::span<const EmbeddingRequest> requests) override;
  const std::string& model_id() const override { return model_id_; }
  std::size_t dim() const override { return dim_; }

  std::size_t size() const noexcept { return vectors_.size(); }
  std::uint64_t lookups() const noexcept { return lookups_.load(); }

 private:
  std::string model_id_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Embedding> vectors_;
  std::atomic<std::uint64_t> lookups_{0};
};

/// Deterministic unit vectors derived from a seeded hash of (instruction,
/// text). Stable across processes and platforms for a given seed.
class SyntheticEmbedder : public Embedder {
 public:
  SyntheticEmbedder(std::size_t dim, std::uint64_t seed, std::string model_id = "synthetic");

  std::vector<Embedding> embed(std::span<const EmbeddingRequest> requests) override;
  const std::string& model_id() const override { return model_id_; }
  std::size_t dim() const override { return dim_; }

  std::uint64_t calls() const noexcept { return calls_.load(); }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::string model_id_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace fairwrite
