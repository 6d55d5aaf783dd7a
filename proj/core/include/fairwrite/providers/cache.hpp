#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fairwrite/providers/embedding.hpp"
#include "fairwrite/providers/fixture_format.hpp"

namespace fairwrite {

struct CacheStats {
  std::size_t records = 0;
  std::size_t bypassed_records = 0;  // corrupt lines skipped at load
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::string model_id;
  std::size_t dim = 0;
};

/// Persistent embedding cache backed by a fixture-format file. Concurrent
/// readers, serialized writers; flush() rewrites the file atomically with
/// records sorted by key.
class EmbeddingCache {
 public:
  /// Opens (or prepares to create) the cache at `path`. A file written for a
  /// different model or dim is a ConfigError. Corrupt records are bypassed
  /// and listed in problems().
  EmbeddingCache(std::filesystem::path path, std::string model_id, std::size_t dim);

  std::optional<Embedding> get(const std::string& key) const;
  void put(const std::string& key, const EmbeddingRequest& request, const Embedding& vector);
  void flush();

  CacheStats stats() const;
  const std::vector<std::string>& problems() const noexcept { return problems_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Summary of a cache file without opening it for writing.
  static CacheStats inspect(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  FixtureManifest manifest_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, FixtureRecord> records_;
  std::vector<std::string> problems_;
  bool dirty_ = false;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
  mutable std::mutex counter_mutex_;
};

/// Wraps another embedder: cache first, then one batched call for misses.
class CachingEmbedder : public Embedder {
 public:
  CachingEmbedder(std::shared_ptr<Embedder> inner, std::shared_ptr<EmbeddingCache> cache,
                  bool flush_on_write = true);

  std::vector<Embedding> embed(std::span<const EmbeddingRequest> requests) override;
  const std::string& model_id() const override { return inner_->model_id(); }
  std::size_t dim() const override { return inner_->dim(); }

  EmbeddingCache& cache() noexcept { return *cache_; }

 private:
  std::shared_ptr<Embedder> inner_;
  std::shared_ptr<EmbeddingCache> cache_;
  bool flush_on_write_;
};

}  // namespace fairwrite
