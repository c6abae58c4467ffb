#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

enum class InfluenceMode { kDense, kKHop };

std::string_view to_string(InfluenceMode mode);
InfluenceMode parse_influence_mode(std::string_view text);

// Pairwise scores keyed by (target j, source i). Dense tables hold every pair;
// k-hop tables hold only the pairs of a SparsePattern. Row j is contiguous.
class PairwiseTable {
 public:
  PairwiseTable() = default;
  static PairwiseTable dense(std::size_t num_nodes);
  static PairwiseTable sparse(SparsePattern support);

  InfluenceMode mode() const noexcept { return mode_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_pairs() const noexcept { return values_.size(); }

  std::span<const NodeId> sources(NodeId target) const noexcept;
  std::span<double> row(NodeId target) noexcept;
  std::span<const double> row(NodeId target) const noexcept;
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  // Score of an unsupported pair is 0.
  double at(NodeId target, NodeId source) const noexcept;

  // Only meaningful for k-hop tables.
  const SparsePattern& support() const noexcept { return support_; }

 private:
  InfluenceMode mode_ = InfluenceMode::kDense;
  std::size_t num_nodes_ = 0;
  std::vector<NodeId> all_nodes_;  // dense: shared source list 0..N-1
  SparsePattern support_;
  std::vector<double> values_;
};

// Applies the normalized adjacency k times; k = 0 copies x.
Matrix propagate_k(const NormalizedAdjacency& a, const Matrix& x, std::size_t k);

// Cosine similarity between two rows; 0 when either has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// score(j, i) = cos(x0_i, xk_j) over all pairs, computed in target blocks.
PairwiseTable raw_influence(const Matrix& x0, const Matrix& xk, std::size_t block_size = 256);
// Same, restricted to a k-hop support.
PairwiseTable raw_influence(const Matrix& x0, const Matrix& xk, SparsePattern support,
                            std::size_t block_size = 256);

// Global affine rescale to [0, 1]; a constant table becomes 0.5 everywhere.
PairwiseTable scale_minmax(PairwiseTable raw);

// Divides each target row by its sum; rows summing to 0 stay zero.
PairwiseTable normalize_per_target(PairwiseTable scaled);

// gis(i) = sum_j I(j <- i), divided by its maximum over i.
Vector global_influence(const PairwiseTable& normalized);

struct InfluenceOptions {
  std::size_t k = 2;
  InfluenceMode mode = InfluenceMode::kDense;
  std::size_t dense_cap = 50'000;
  std::size_t block_size = 256;
  // When set, a matching cache file is loaded instead of recomputing, and a
  // fresh result is written back.
  std::filesystem::path cache_path;
};

struct InfluenceTable {
  InfluenceMode mode = InfluenceMode::kDense;
  std::size_t k = 2;
  std::string content_hash;
  // Absent when loaded from a dense-mode cache, which stores only gis.
  std::optional<PairwiseTable> pairwise;
  Vector gis;
  bool from_cache = false;

  std::span<const double> weights() const noexcept { return gis; }
};

InfluenceTable compute_influence(const Graph& g, const Matrix& features,
                                 const InfluenceOptions& options = {});

void save_influence_cache(const std::filesystem::path& path, const InfluenceTable& table);
InfluenceTable load_influence_cache(const std::filesystem::path& path);

}  // namespace infgrand
