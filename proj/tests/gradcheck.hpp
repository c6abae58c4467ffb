#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "infgrand/graph.hpp"
#include "infgrand/mlp.hpp"
#include "infgrand/params.hpp"
#include "oracles.hpp"

namespace gradcheck {

// ||a - b|| / max(||a||, ||b||), over all blocks; 0 when both are zero.
template <class P>
double relative_error(const P& a, const P& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  const auto ab = a.blocks();
  const auto bb = b.blocks();
  for (std::size_t k = 0; k < ab.size(); ++k)
    for (std::size_t i = 0; i < ab[k].size(); ++i) {
      diff += (ab[k][i] - bb[k][i]) * (ab[k][i] - bb[k][i]);
      na += ab[k][i] * ab[k][i];
      nb += bb[k][i] * bb[k][i];
    }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

// A small student problem: graph, features, labels, teacher logits, node
// weights and parameters whose hidden pre-activations all stay at least
// 1e-4 away from the ReLU kink.
struct Problem {
  infgrand::Graph graph;
  infgrand::Matrix x;
  std::vector<int> labels;
  std::vector<infgrand::NodeId> labeled;
  infgrand::Matrix teacher;
  std::vector<double> weights;
  infgrand::MlpParams params;
};

inline Problem random_problem(std::mt19937_64& rng, std::size_t max_n = 15, std::size_t max_d = 8,
                              std::size_t max_f = 6, std::size_t max_c = 4) {
  Problem p;
  const std::size_t n = 3 + rng() % (max_n - 2);
  const std::size_t d = 1 + rng() % max_d;
  const std::size_t f = 1 + rng() % max_f;
  const std::size_t c = 2 + rng() % (max_c - 1);
  p.graph = infgrand::build_graph(oracle::random_edges(n, 0.35, rng), n);
  p.x = oracle::random_matrix(n, d, rng);
  p.teacher = oracle::random_matrix(n, c, rng, -2.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.labels.push_back(static_cast<int>(rng() % c));
    p.weights.push_back(u(rng));
    if (i % 2 == 0) p.labeled.push_back(static_cast<infgrand::NodeId>(i));
  }
  while (true) {
    p.params = infgrand::init_mlp(d, f, c, rng());
    for (double& v : p.params.b1) v = 0.2 * (u(rng) - 0.5);
    for (double& v : p.params.b2) v = 0.2 * (u(rng) - 0.5);
    const auto acts = infgrand::mlp_forward(p.params, p.x);
    bool clear = true;
    for (double v : acts.pre_hidden.values()) clear = clear && std::abs(v) >= 1e-4;
    if (clear) break;
  }
  return p;
}

}  // namespace gradcheck
