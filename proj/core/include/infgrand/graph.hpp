#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infgrand/matrix.hpp"

namespace infgrand {

using NodeId = std::uint32_t;

// Raw edge as read from input; signed so out-of-range values can be reported.
struct EdgePair {
  std::int64_t u = 0;
  std::int64_t v = 0;
};

// Immutable undirected graph in CSR form. Every edge is stored in both
// directions, rows are sorted and duplicate-free, and self-loops are absent.
class Graph {
 public:
  Graph() : row_ptr_{0} {}

  std::size_t num_nodes() const noexcept { return row_ptr_.size() - 1; }
  // Directed CSR entries (twice the undirected edge count).
  std::size_t num_entries() const noexcept { return col_idx_.size(); }
  std::size_t num_edges() const noexcept { return col_idx_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::size_t degree(NodeId i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
  bool has_edge(NodeId i, NodeId j) const noexcept;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<NodeId>& col_idx() const noexcept { return col_idx_; }

  // Each undirected edge once, as (i, j) with i < j, in CSR order.
  std::vector<EdgePair> undirected_edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(std::span<const EdgePair> edges, std::size_t num_nodes);
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> col_idx_;
};

// Canonicalizes an arbitrary edge list: symmetrizes, removes duplicates and
// self-loops, sorts rows. Throws InputError naming the first out-of-range pair.
Graph build_graph(std::span<const EdgePair> edges, std::size_t num_nodes);

// D^-1/2 (A + I) D^-1/2 with D the degree of A + I. Same CSR layout as the
// graph plus the diagonal, with one weight per entry.
struct NormalizedAdjacency {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> weights;

  std::span<const NodeId> row_cols(NodeId i) const noexcept {
    return {col_idx.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
  std::span<const double> row_weights(NodeId i) const noexcept {
    return {weights.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
  double weight(NodeId i, NodeId j) const noexcept;
};

NormalizedAdjacency normalize_adjacency(const Graph& g);

// Exact sparse-dense product a * x.
Matrix spmm(const NormalizedAdjacency& a, const Matrix& x);

// Sorted per-row set of column indices; row j lists the nodes paired with j.
struct SparsePattern {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;

  std::span<const NodeId> row(NodeId j) const noexcept {
    return {col_idx.data() + row_ptr[j], row_ptr[j + 1] - row_ptr[j]};
  }
  std::size_t num_pairs() const noexcept { return col_idx.size(); }
  bool contains(NodeId j, NodeId i) const noexcept;
};

// All (j, i) with shortest-path distance <= k, including (j, j).
SparsePattern k_hop_mask(const Graph& g, std::size_t k);

struct Subgraph {
  Graph graph;
  // Local index -> original node id; local order follows the keep list.
  std::vector<NodeId> original_ids;
};

// Subgraph induced by `keep`. Local index l corresponds to keep[l].
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> keep);

}  // namespace infgrand
