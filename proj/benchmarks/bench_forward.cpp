#include <benchmark/benchmark.h>

#include <map>

#include "infgrand/gcn.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/mlp.hpp"
#include "infgrand/propagation.hpp"
#include "infgrand/synthetic.hpp"

namespace {

struct Inputs {
  infgrand::Dataset data;
  infgrand::NormalizedAdjacency a;
  infgrand::Matrix xtilde;
};

const Inputs& inputs(std::size_t n) {
  static std::map<std::size_t, Inputs> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const double scale = 4.0 / static_cast<double>(n);
    Inputs in;
    in.data = infgrand::generate_synthetic({.num_nodes = n, .num_classes = 5, .feature_dim = 128,
                                            .p_intra = 3.0 * scale, .p_inter = 0.3 * scale, .seed = 3});
    in.a = infgrand::normalize_adjacency(in.data.graph);
    in.xtilde = infgrand::student_input(in.data.graph, in.data.features).matrix;
    it = cache.emplace(n, std::move(in)).first;
  }
  return it->second;
}

}  // namespace

// Inference latency: the student needs only its pooled input.
static void BM_MlpForward(benchmark::State& state) {
  const auto& in = inputs(static_cast<std::size_t>(state.range(0)));
  const auto p = infgrand::init_mlp(128, 64, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::mlp_forward(p, in.xtilde));
}
BENCHMARK(BM_MlpForward)->Arg(2500)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_GcnForward(benchmark::State& state) {
  const auto& in = inputs(static_cast<std::size_t>(state.range(0)));
  const auto p = infgrand::init_gcn(128, 64, 5, 1, static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(infgrand::gcn_forward(p, in.a, in.data.features));
}
BENCHMARK(BM_GcnForward)->Args({2500, 2})->Args({10000, 2})->Args({10000, 3})->Unit(benchmark::kMillisecond);

static void BM_StudentTrainingStep(benchmark::State& state) {
  const auto& in = inputs(2500);
  const auto p = infgrand::init_mlp(128, 64, 5, 1);
  const auto teacher = infgrand::gcn_forward(infgrand::init_gcn(128, 64, 5, 2), in.a, in.data.features);
  const std::vector<double> w(in.data.num_nodes(), 0.5);
  std::vector<infgrand::NodeId> labeled;
  for (infgrand::NodeId i = 0; i < 100; ++i) labeled.push_back(i);
  const infgrand::LossWeights lw;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        infgrand::backward_total(p, in.xtilde, in.data.labels, labeled, teacher, in.data.graph, w, lw));
}
BENCHMARK(BM_StudentTrainingStep)->Unit(benchmark::kMillisecond);
