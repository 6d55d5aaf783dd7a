#include "fairwrite/providers/cache.hpp"

#include <chrono>
#include <ctime>

#include "fairwrite/errors.hpp"
#include "fairwrite/util/files.hpp"

namespace fairwrite {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path path, std::string model_id, std::size_t dim)
    : path_(std::move(path)), manifest_{std::move(model_id), dim} {
  if (!std::filesystem::exists(path_)) return;
  FixtureFile file = read_fixture_file(path_, /*strict=*/false);
  if (file.manifest.model_id != manifest_.model_id || file.manifest.dim != manifest_.dim) {
    throw ConfigError("cache '" + path_.string() + "' belongs to model '" +
                      file.manifest.model_id + "' (dim " + std::to_string(file.manifest.dim) +
                      "), expected '" + manifest_.model_id + "' (dim " +
                      std::to_string(manifest_.dim) + ")");
  }
  problems_ = std::move(file.problems);
  for (auto& record : file.records) {
    std::string key = record.key;
    records_.insert_or_assign(std::move(key), std::move(record));
  }
  // Rewrite on next flush so corrupt lines are dropped from disk.
  dirty_ = !problems_.empty();
}

std::optional<Embedding> EmbeddingCache::get(const std::string& key) const {
  std::optional<Embedding> found;
  {
    std::shared_lock lock(mutex_);
    if (auto it = records_.find(key); it != records_.end()) {
      found.emplace(it->second.vector);
    }
  }
  std::lock_guard counter_lock(counter_mutex_);
  ++(found ? hits_ : misses_);
  return found;
}

void EmbeddingCache::put(const std::string& key, const EmbeddingRequest& request,
                         const Embedding& vector) {
  if (vector.dim() != manifest_.dim) {
    throw InvalidArgument("cache put: vector dim " + std::to_string(vector.dim()) +
                          " does not match cache dim " + std::to_string(manifest_.dim));
  }
  std::vector<double> values(vector.values().begin(), vector.values().end());
  FixtureRecord record{key, request.text, request.instruction, values, utc_timestamp(),
                       vector_checksum(values)};
  std::unique_lock lock(mutex_);
  records_.insert_or_assign(key, std::move(record));
  dirty_ = true;
}

void EmbeddingCache::flush() {
  std::unique_lock lock(mutex_);
  if (!dirty_) return;
  std::vector<FixtureRecord> ordered;
  ordered.reserve(records_.size());
  for (const auto& [key, record] : records_) ordered.push_back(record);
  write_file_atomic(path_, render_fixture(manifest_, ordered));
  dirty_ = false;
}

CacheStats EmbeddingCache::stats() const {
  CacheStats stats;
  {
    std::shared_lock lock(mutex_);
    stats.records = records_.size();
  }
  stats.bypassed_records = problems_.size();
  stats.model_id = manifest_.model_id;
  stats.dim = manifest_.dim;
  std::lock_guard counter_lock(counter_mutex_);
  stats.hits = hits_;
  stats.misses = misses_;
  return stats;
}

CacheStats EmbeddingCache::inspect(const std::filesystem::path& path) {
  FixtureFile file = read_fixture_file(path, /*strict=*/false);
  CacheStats stats;
  stats.records = file.records.size();
  stats.bypassed_records = file.problems.size();
  stats.model_id = file.manifest.model_id;
  stats.dim = file.manifest.dim;
  return stats;
}

CachingEmbedder::CachingEmbedder(std::shared_ptr<Embedder> inner,
                                 std::shared_ptr<EmbeddingCache> cache, bool flush_on_write)
    : inner_(std::move(inner)), cache_(std::move(cache)), flush_on_write_(flush_on_write) {
  if (!inner_ || !cache_) throw ConfigError("caching embedder needs an inner embedder and a cache");
}

std::vector<Embedding> CachingEmbedder::embed(std::span<const EmbeddingRequest> requests) {
  std::vector<std::optional<Embedding>> results(requests.size());
  std::vector<std::string> keys(requests.size());
  std::vector<EmbeddingRequest> missing;
  std::vector<std::size_t> missing_index;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    keys[i] = embedding_key(inner_->model_id(), requests[i].instruction, requests[i].text);
    results[i] = cache_->get(keys[i]);
    if (!results[i]) {
      missing.push_back(requests[i]);
      missing_index.push_back(i);
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_->embed(missing);
    if (fresh.size() != missing.size()) {
      throw ProviderError("embedder returned " + std::to_string(fresh.size()) + " vectors for " +
                          std::to_string(missing.size()) + " requests");
    }
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      const std::size_t i = missing_index[j];
      cache_->put(keys[i], requests[i], fresh[j]);
      results[i] = std::move(fresh[j]);
    }
    if (flush_on_write_) cache_->flush();
  }
  std::vector<Embedding> out;
  out.reserve(results.size());
  for (auto& result : results) out.push_back(std::move(*result));
  return out;
}

}  // namespace fairwrite
