#include "infgrand/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "infgrand/error.hpp"
#include "infgrand/params.hpp"

namespace infgrand {

void SyntheticSpec::validate() const {
  if (num_nodes == 0) throw InputError("synthetic graph needs at least one node");
  if (num_classes == 0 || num_classes > num_nodes)
    throw InputError("num_classes must be in [1, num_nodes]");
  if (feature_dim == 0) throw InputError("feature_dim must be positive");
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_prob(p_intra) || !is_prob(p_inter))
    throw InputError("edge probabilities must lie in [0, 1]");
  if (!(separation >= 0.0) || !(noise >= 0.0) || !std::isfinite(separation) || !std::isfinite(noise))
    throw InputError("separation and noise must be finite and non-negative");
}

namespace {

// Visits a Bernoulli(p) sample of the indices [0, count) in increasing order
// using geometric gaps.
template <class F>
void sample_indices(std::uint64_t count, double p, std::mt19937_64& rng, F&& emit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < count; ++t) emit(t);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t t = 0;
  while (true) {
    double u = uniform_unit(rng);
    while (u == 0.0) u = uniform_unit(rng);
    const double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(count - t)) return;
    t += static_cast<std::uint64_t>(gap);
    emit(t);
    if (++t >= count) return;
  }
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.num_nodes;
  const std::size_t c = spec.num_classes;

  Dataset d;
  d.name = "synthetic";
  d.num_classes = c;
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.labels[i] = static_cast<int>(i % c);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(d.labels[i - 1], d.labels[j]);
  }

  std::vector<std::vector<NodeId>> members(c);
  for (std::size_t i = 0; i < n; ++i) members[d.labels[i]].push_back(static_cast<NodeId>(i));

  std::vector<EdgePair> edges;
  for (std::size_t a = 0; a < c; ++a) {
    const auto& ma = members[a];
    const std::uint64_t na = ma.size();
    // Upper triangle of the block: pair t -> (r, s) with r < s.
    sample_indices(na * (na - (na > 0)) / 2, spec.p_intra, rng, [&](std::uint64_t t) {
      std::uint64_t s = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
      while (s * (s - 1) / 2 > t) --s;
      while ((s + 1) * s / 2 <= t) ++s;
      const std::uint64_t r = t - s * (s - 1) / 2;
      edges.push_back({ma[r], ma[s]});
    });
    for (std::size_t b = a + 1; b < c; ++b) {
      const auto& mb = members[b];
      sample_indices(na * mb.size(), spec.p_inter, rng, [&](std::uint64_t t) {
        edges.push_back({ma[t / mb.size()], mb[t % mb.size()]});
      });
    }
  }
  d.graph = build_graph(edges, n);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix centers(c, spec.feature_dim);
  for (std::size_t k = 0; k < c; ++k) {
    auto row = centers.row(k);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& v : row) {
        v = gauss(rng);
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = spec.separation / std::sqrt(norm2);
    for (double& v : row) v *= scale;
  }
  d.features = Matrix(n, spec.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto center = centers.row(static_cast<std::size_t>(d.labels[i]));
    auto row = d.features.row(i);
    for (std::size_t q = 0; q < row.size(); ++q) row[q] = center[q] + spec.noise * gauss(rng);
  }
  return d;
}

double edge_homophily(const Dataset& data) {
  const auto edges = data.graph.undirected_edges();
  if (edges.empty()) return 0.0;
  std::size_t same = 0;
  for (const auto& e : edges) same += data.labels[e.u] == data.labels[e.v];
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

}  // namespace infgrand
