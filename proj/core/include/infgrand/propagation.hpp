#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

enum class PoolMode { kMean, kMax, kMin };

std::string_view to_string(PoolMode mode);
PoolMode parse_pool_mode(std::string_view text);

// Structure-enriched student input: pooled {A^p X}, p = 0..hops.
struct PooledFeatures {
  Matrix matrix;
  std::size_t hops = 0;
  PoolMode pool = PoolMode::kMean;
  std::string graph_hash;
};

// Element p is A^p x; element 0 is x itself.
std::vector<Matrix> multi_hop_features(const NormalizedAdjacency& a, const Matrix& x,
                                       std::size_t hops);

// Elementwise mean / max / min across equally shaped matrices.
Matrix pool(std::span<const Matrix> mats, PoolMode mode);

// In-memory memo of pooled features keyed by (content hash, hops, pool).
class PropagationCache {
 public:
  const PooledFeatures* find(const std::string& hash, std::size_t hops, PoolMode mode) const;
  const PooledFeatures& insert(PooledFeatures features);
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  friend PooledFeatures student_input(const Graph&, const Matrix&, std::size_t, PoolMode,
                                      PropagationCache*);
  using Key = std::tuple<std::string, std::size_t, int>;
  mutable std::mutex mutex_;
  std::map<Key, PooledFeatures> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// normalize_adjacency -> multi_hop_features -> pool. With a cache, a repeated
// request for the same graph/features/hops/pool returns the stored matrix.
PooledFeatures student_input(const Graph& g, const Matrix& x, std::size_t hops = 2,
                             PoolMode mode = PoolMode::kMean, PropagationCache* cache = nullptr);

// Binary file: magic "IGXT", u32 version, u32 hops, u32 pool, u32 hash length,
// hash bytes, u64 rows, u64 cols, little-endian f64 payload (row-major).
void save_pooled_features(const std::filesystem::path& path, const PooledFeatures& features);
PooledFeatures load_pooled_features(const std::filesystem::path& path);

}  // namespace infgrand
