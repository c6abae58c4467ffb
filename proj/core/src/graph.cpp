#include "infgrand/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infgrand/error.hpp"
#include "infgrand/parallel.hpp"

namespace infgrand {

bool Graph::has_edge(NodeId i, NodeId j) const noexcept {
  auto n = neighbors(i);
  return std::binary_search(n.begin(), n.end(), j);
}

std::vector<EdgePair> Graph::undirected_edges() const {
  std::vector<EdgePair> out;
  out.reserve(num_edges());
  for (NodeId i = 0; i < num_nodes(); ++i)
    for (NodeId j : neighbors(i))
      if (i < j) out.push_back({i, j});
  return out;
}

Graph build_graph(std::span<const EdgePair> edges, std::size_t num_nodes) {
  const auto n = static_cast<std::int64_t>(num_nodes);
  std::vector<std::size_t> counts(num_nodes + 1, 0);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") has an endpoint outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) continue;
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) counts[i + 1] += counts[i];

  std::vector<NodeId> scratch(counts.back());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    scratch[cursor[e.u]++] = static_cast<NodeId>(e.v);
    scratch[cursor[e.v]++] = static_cast<NodeId>(e.u);
  }

  Graph g;
  g.row_ptr_.assign(num_nodes + 1, 0);
  g.col_idx_.reserve(scratch.size());
  for (std::size_t i = 0; i < num_nodes; ++i) {
    auto first = scratch.begin() + static_cast<std::ptrdiff_t>(counts[i]);
    auto last = scratch.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    g.col_idx_.insert(g.col_idx_.end(), first, last);
    g.row_ptr_[i + 1] = g.col_idx_.size();
  }
  return g;
}

double NormalizedAdjacency::weight(NodeId i, NodeId j) const noexcept {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return weights[row_ptr[i] + static_cast<std::size_t>(it - cols.begin())];
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  NormalizedAdjacency a;
  a.num_nodes = n;
  a.row_ptr.assign(n + 1, 0);
  a.col_idx.reserve(g.num_entries() + n);
  a.weights.reserve(g.num_entries() + n);

  std::vector<double> deg(n);
  for (NodeId i = 0; i < n; ++i) deg[i] = static_cast<double>(g.degree(i) + 1);

  for (NodeId i = 0; i < n; ++i) {
    bool diagonal_done = false;
    auto emit = [&](NodeId j) {
      a.col_idx.push_back(j);
      // d_i * d_j is exact and commutative, so (i,j) and (j,i) match bit-for-bit.
      a.weights.push_back(1.0 / std::sqrt(deg[i] * deg[j]));
    };
    for (NodeId j : g.neighbors(i)) {
      if (!diagonal_done && j > i) {
        emit(i);
        diagonal_done = true;
      }
      emit(j);
    }
    if (!diagonal_done) emit(i);
    a.row_ptr[i + 1] = a.col_idx.size();
  }
  return a;
}

Matrix spmm(const NormalizedAdjacency& a, const Matrix& x) {
  if (a.num_nodes != x.rows()) {
    throw InputError("spmm: adjacency has " + std::to_string(a.num_nodes) +
                     " nodes but feature matrix has " + std::to_string(x.rows()) + " rows");
  }
  Matrix out(x.rows(), x.cols());
  const std::size_t d = x.cols();
  parallel_for(a.num_nodes, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* o = out.row(i).data();
      auto cols = a.row_cols(static_cast<NodeId>(i));
      auto w = a.row_weights(static_cast<NodeId>(i));
      for (std::size_t e = 0; e < cols.size(); ++e) {
        const double* xr = x.row(cols[e]).data();
        const double we = w[e];
        for (std::size_t c = 0; c < d; ++c) o[c] += we * xr[c];
      }
    }
  });
  return out;
}

bool SparsePattern::contains(NodeId j, NodeId i) const noexcept {
  auto r = row(j);
  return std::binary_search(r.begin(), r.end(), i);
}

SparsePattern k_hop_mask(const Graph& g, std::size_t k) {
  if (k < 1) throw InputError("k_hop_mask: k must be at least 1");
  const std::size_t n = g.num_nodes();
  SparsePattern p;
  p.num_nodes = n;
  p.row_ptr.assign(n + 1, 0);

  std::vector<std::size_t> depth(n, static_cast<std::size_t>(-1));
  std::vector<NodeId> frontier, next, reached;
  for (NodeId s = 0; s < n; ++s) {
    reached.clear();
    frontier.assign(1, s);
    depth[s] = 0;
    reached.push_back(s);
    for (std::size_t level = 1; level <= k && !frontier.empty(); ++level) {
      next.clear();
      for (NodeId u : frontier)
        for (NodeId v : g.neighbors(u))
          if (depth[v] == static_cast<std::size_t>(-1)) {
            depth[v] = level;
            next.push_back(v);
            reached.push_back(v);
          }
      frontier.swap(next);
    }
    for (NodeId v : reached) depth[v] = static_cast<std::size_t>(-1);
    std::sort(reached.begin(), reached.end());
    p.col_idx.insert(p.col_idx.end(), reached.begin(), reached.end());
    p.row_ptr[s + 1] = p.col_idx.size();
  }
  return p;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> keep) {
  if (keep.empty()) throw InputError("induced_subgraph: keep set is empty");
  const NodeId absent = static_cast<NodeId>(-1);
  std::vector<NodeId> local(g.num_nodes(), absent);
  for (std::size_t l = 0; l < keep.size(); ++l) {
    const NodeId v = keep[l];
    if (v >= g.num_nodes())
      throw InputError("induced_subgraph: node " + std::to_string(v) + " out of range");
    if (local[v] != absent)
      throw InputError("induced_subgraph: node " + std::to_string(v) + " listed twice");
    local[v] = static_cast<NodeId>(l);
  }
  std::vector<EdgePair> edges;
  for (NodeId v : keep)
    for (NodeId w : g.neighbors(v))
      if (local[w] != absent && v < w) edges.push_back({local[v], local[w]});
  Subgraph sub;
  sub.graph = build_graph(edges, keep.size());
  sub.original_ids.assign(keep.begin(), keep.end());
  return sub;
}

}  // namespace infgrand
