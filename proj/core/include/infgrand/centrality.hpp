#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

enum class CentralityKind { kDegree, kPageRank };

std::string_view to_string(CentralityKind kind);

// Max-normalized node scores; a drop-in replacement for the global influence
// score in the weighted losses.
struct CentralityVector {
  CentralityKind kind = CentralityKind::kDegree;
  Vector scores;

  std::span<const double> weights() const noexcept { return scores; }
};

CentralityVector degree_centrality(const Graph& g);

struct PageRankOptions {
  double damping = 0.85;
  std::size_t max_iterations = 200;
  double tolerance = 1e-8;  // L1 change between iterates
};

struct PageRankResult {
  Vector distribution;  // sums to 1
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration; mass of isolated nodes is spread uniformly.
PageRankResult pagerank_distribution(const Graph& g, const PageRankOptions& options = {});

// Max-normalized PageRank. Warns on stderr when the iteration cap is hit.
CentralityVector pagerank(const Graph& g, const PageRankOptions& options = {});

}  // namespace infgrand
