#include "infgrand/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "infgrand/error.hpp"

namespace infgrand {

std::string_view to_string(CentralityKind kind) {
  return kind == CentralityKind::kDegree ? "degree" : "pagerank";
}

namespace {

void max_normalize(Vector& v) {
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x /= peak;
}

}  // namespace

CentralityVector degree_centrality(const Graph& g) {
  CentralityVector c{CentralityKind::kDegree, Vector(g.num_nodes())};
  for (NodeId i = 0; i < g.num_nodes(); ++i) c.scores[i] = static_cast<double>(g.degree(i));
  max_normalize(c.scores);
  return c;
}

PageRankResult pagerank_distribution(const Graph& g, const PageRankOptions& options) {
  if (!(options.damping > 0.0 && options.damping < 1.0))
    throw InputError("pagerank: damping must lie in (0, 1)");
  const std::size_t n = g.num_nodes();
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Vector rank(n, inv_n), next(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId i = 0; i < n; ++i)
      if (g.degree(i) == 0) dangling += rank[i];
    const double base = (1.0 - options.damping) * inv_n + options.damping * dangling * inv_n;
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (NodeId j : g.neighbors(i)) incoming += rank[j] / static_cast<double>(g.degree(j));
      next[i] = base + options.damping * incoming;
      change += std::abs(next[i] - rank[i]);
    }
    rank.swap(next);
    result.iterations = it + 1;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.distribution = std::move(rank);
  return result;
}

CentralityVector pagerank(const Graph& g, const PageRankOptions& options) {
  auto result = pagerank_distribution(g, options);
  if (!result.converged) {
    std::cerr << "warning: pagerank did not reach tolerance " << options.tolerance << " within "
              << options.max_iterations << " iterations; returning the last iterate\n";
  }
  CentralityVector c{CentralityKind::kPageRank, std::move(result.distribution)};
  max_normalize(c.scores);
  return c;
}

}  // namespace infgrand
