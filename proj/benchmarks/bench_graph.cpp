#include <benchmark/benchmark.h>

#include "infgrand/graph.hpp"
#include "infgrand/propagation.hpp"
#include "infgrand/synthetic.hpp"

namespace {

infgrand::Dataset sbm(std::size_t n, std::size_t d) {
  const double scale = 4.0 / static_cast<double>(n);
  return infgrand::generate_synthetic({.num_nodes = n, .num_classes = 4, .feature_dim = d,
                                       .p_intra = 3.0 * scale, .p_inter = 0.3 * scale, .seed = 1});
}

}  // namespace

static void BM_Spmm(benchmark::State& state) {
  const auto data = sbm(static_cast<std::size_t>(state.range(0)), 64);
  const auto a = infgrand::normalize_adjacency(data.graph);
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::spmm(a, data.features));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.col_idx.size()));
}
BENCHMARK(BM_Spmm)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMicrosecond);

static void BM_NormalizeAdjacency(benchmark::State& state) {
  const auto data = sbm(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::normalize_adjacency(data.graph));
}
BENCHMARK(BM_NormalizeAdjacency)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMicrosecond);

static void BM_StudentInput(benchmark::State& state) {
  const auto data = sbm(8192, 64);
  const auto hops = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::student_input(data.graph, data.features, hops));
}
BENCHMARK(BM_StudentInput)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
