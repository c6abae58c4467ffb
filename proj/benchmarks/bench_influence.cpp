#include <benchmark/benchmark.h>

#include "infgrand/centrality.hpp"
#include "infgrand/influence.hpp"
#include "infgrand/synthetic.hpp"

namespace {

infgrand::Dataset sbm(std::size_t n) {
  const double scale = 4.0 / static_cast<double>(n);
  return infgrand::generate_synthetic({.num_nodes = n, .num_classes = 4, .feature_dim = 32,
                                       .p_intra = 3.0 * scale, .p_inter = 0.3 * scale, .seed = 2});
}

}  // namespace

static void BM_InfluenceDense(benchmark::State& state) {
  const auto data = sbm(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::compute_influence(data.graph, data.features));
}
BENCHMARK(BM_InfluenceDense)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

static void BM_InfluenceKHop(benchmark::State& state) {
  const auto data = sbm(static_cast<std::size_t>(state.range(0)));
  const infgrand::InfluenceOptions opt{.k = 2, .mode = infgrand::InfluenceMode::kKHop};
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::compute_influence(data.graph, data.features, opt));
}
BENCHMARK(BM_InfluenceKHop)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

static void BM_KHopMask(benchmark::State& state) {
  const auto data = sbm(8192);
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::k_hop_mask(data.graph, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_KHopMask)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_PageRank(benchmark::State& state) {
  const auto data = sbm(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::pagerank(data.graph));
}
BENCHMARK(BM_PageRank)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMicrosecond);
