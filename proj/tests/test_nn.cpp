#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "gradcheck.hpp"
#include "infgrand/checkpoint.hpp"
#include "infgrand/error.hpp"
#include "infgrand/finite_difference.hpp"
#include "infgrand/gcn.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/mlp.hpp"
#include "infgrand/optimizer.hpp"
#include "infgrand/softmax.hpp"
#include "oracles.hpp"

using namespace infgrand;

// A one-block parameter set for exercising the generic templates.
struct Flat {
  std::vector<double> theta;
  std::vector<std::span<double>> blocks() { return {theta}; }
  std::vector<std::span<const double>> blocks() const { return {theta}; }
  Flat zeros_like() const { return {std::vector<double>(theta.size(), 0.0)}; }
};
static_assert(ParameterSet<Flat>);

TEST(Softmax, UniformAndStableRows) {
  const Matrix p = softmax_rows(Matrix{{0.0, 0.0, 0.0, 0.0}, {1000.0, 0.0, 0.0, 0.0}});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p(0, k), 0.25);
  EXPECT_NEAR(p(1, 0), 1.0, 1e-15);
  EXPECT_EQ(p(1, 1), 0.0);
  EXPECT_TRUE(all_finite(log_softmax_rows(Matrix{{1000.0, -1000.0}})));
}

TEST(Softmax, MatchesLongDoubleOracle) {
  std::mt19937_64 rng(2);
  const Matrix z = oracle::random_matrix(50, 5, rng, -20.0, 20.0);
  for (double tau : {0.5, 1.0, 2.0}) {
    const Matrix p = softmax_rows(z, tau);
    const Matrix lp = log_softmax_rows(z, tau);
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const auto ref = oracle::log_softmax(oracle::row(z, r), tau);
      double sum = 0.0;
      for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(lp(r, k), ref[k], 1e-12);
        EXPECT_NEAR(p(r, k), std::exp(ref[k]), 1e-12);
        sum += p(r, k);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(SoftmaxJacobian, OneHotUniformAndRowSums) {
  const Matrix zero = softmax_jacobian(std::vector<double>{0.0, 1.0, 0.0});
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(softmax_jacobian(std::vector<double>{0.5, 0.5}), (Matrix{{0.25, -0.25}, {-0.25, 0.25}}));
  std::mt19937_64 rng(3);
  const Matrix p = softmax_rows(oracle::random_matrix(1, 5, rng));
  const Matrix j = softmax_jacobian(p.row(0));
  for (std::size_t a = 0; a < 5; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < 5; ++b) {
      s += j(a, b);
      EXPECT_EQ(j(a, b), j(b, a));
    }
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(SoftmaxJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const Matrix z = oracle::random_matrix(1, 4, rng);
  const Matrix j = softmax_jacobian(softmax_rows(z).row(0));
  const double h = 1e-6;
  for (std::size_t b = 0; b < 4; ++b) {
    Matrix up = z, down = z;
    up(0, b) += h;
    down(0, b) -= h;
    const Matrix pu = softmax_rows(up), pd = softmax_rows(down);
    for (std::size_t a = 0; a < 4; ++a) EXPECT_NEAR((pu(0, a) - pd(0, a)) / (2 * h), j(a, b), 1e-6);
  }
}

TEST(Init, SeededGlorotBoundsAndZeroBiases) {
  const auto a = init_mlp(30, 20, 5, 9);
  EXPECT_EQ(a, init_mlp(30, 20, 5, 9));
  EXPECT_NE(a, init_mlp(30, 20, 5, 10));
  const double b1 = glorot_bound(30, 20), b2 = glorot_bound(20, 5);
  for (double v : a.w1.values()) EXPECT_LE(std::abs(v), b1);
  for (double v : a.w2.values()) EXPECT_LE(std::abs(v), b2);
  for (double v : a.b1) EXPECT_EQ(v, 0.0);
  const auto g = init_gcn(30, 20, 5, 9, 3);
  EXPECT_EQ(g.num_layers(), 3u);
  for (const auto& b : g.biases)
    for (double v : b) EXPECT_EQ(v, 0.0);
}

TEST(Init, EmpiricalMeanNearZero) {
  const auto p = init_mlp(100, 100, 2, 1);
  const auto w = p.w1.values();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  const double sigma = glorot_bound(100, 100) / std::sqrt(3.0) / std::sqrt(static_cast<double>(w.size()));
  EXPECT_LT(std::abs(mean), 3.0 * sigma);
}

TEST(MlpForward, ZeroWeightsGiveZeroLogits) {
  MlpParams p = init_mlp(3, 4, 2, 0).zeros_like();
  const Matrix logits = mlp_forward(p, Matrix{{1.0, 2.0, 3.0}}).logits;
  for (double v : logits.values()) EXPECT_EQ(v, 0.0);
}

TEST(MlpForward, IdentityWeightsPassNonnegativeInput) {
  MlpParams p = init_mlp(3, 3, 3, 0).zeros_like();
  for (std::size_t i = 0; i < 3; ++i) p.w1(i, i) = p.w2(i, i) = 1.0;
  const Matrix x{{0.5, 2.0, 0.0}, {1.0, 0.0, 3.0}};
  EXPECT_EQ(mlp_forward(p, x).logits, x);
}

TEST(MlpForward, MatchesScalarOracleAndChecksShape) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = init_mlp(1 + rng() % 8, 1 + rng() % 8, 2 + rng() % 4, rng());
    const Matrix x = oracle::random_matrix(1 + rng() % 10, p.input_dim(), rng);
    EXPECT_LE(max_abs_difference(mlp_forward(p, x).logits, oracle::mlp_logits(p, x)), 1e-12);
  }
  EXPECT_THROW(mlp_forward(init_mlp(3, 2, 2, 0), Matrix(1, 4)), InputError);
}

TEST(MlpForwardTrain, ZeroRateMatchesEvaluation) {
  std::mt19937_64 rng(6);
  const auto p = init_mlp(4, 5, 3, 1);
  const Matrix x = oracle::random_matrix(7, 4, rng);
  EXPECT_EQ(mlp_forward_train(p, x, 0.0, rng).logits, mlp_forward(p, x).logits);
}

TEST(GcnForward, TrivialCasesAndOracle) {
  const auto a1 = normalize_adjacency(build_graph({}, 1));
  GcnParams id = init_gcn(2, 2, 2, 0).zeros_like();
  for (auto& w : id.weights)
    for (std::size_t i = 0; i < 2; ++i) w(i, i) = 1.0;
  EXPECT_EQ(gcn_forward(id, a1, Matrix{{0.5, 1.5}}), (Matrix{{0.5, 1.5}}));
  const Matrix zero = gcn_forward(init_gcn(2, 3, 2, 0).zeros_like(), a1, Matrix{{1.0, 1.0}});
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto edges = oracle::random_edges(10, 0.3, rng);
    auto p = init_gcn(4, 5, 3, rng(), 2 + trial % 2);
    for (auto& b : p.biases)
      for (double& v : b) v = 0.1;
    const Matrix x = oracle::random_matrix(10, 4, rng);
    const auto ref = oracle::gcn_logits(p, oracle::normalized(oracle::adjacency(10, edges)), x);
    EXPECT_LE(max_abs_difference(gcn_forward(p, normalize_adjacency(build_graph(edges, 10)), x), ref), 1e-12);
  }
}

TEST(FiniteDifference, QuadraticAndLinear) {
  Flat t{{0.3, -1.2, 2.5}};
  const auto g = finite_difference([](const Flat& f) {
    double s = 0.0;
    for (double v : f.theta) s += 0.5 * v * v;
    return s;
  }, t);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g.theta[i], t.theta[i], 1e-9);
  const std::vector<double> a{2.0, -3.0, 0.5};
  const auto lin = finite_difference([&](const Flat& f) {
    return std::inner_product(a.begin(), a.end(), f.theta.begin(), 0.0);
  }, t);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(lin.theta[i], a[i], 1e-9);
}

TEST(GcnBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto edges = oracle::random_edges(10, 0.3, rng);
    const auto a = normalize_adjacency(build_graph(edges, 10));
    const Matrix x = oracle::random_matrix(10, 4, rng);
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) labels.push_back(static_cast<int>(rng() % 3));
    const std::vector<NodeId> labeled{0, 2, 3, 7};
    auto p = init_gcn(4, 5, 3, rng(), 2 + trial % 2);
    const auto g = gcn_backward(p, a, x, labels, labeled);
    const auto fd = finite_difference([&](const GcnParams& q) { return gcn_loss(q, a, x, labels, labeled); }, p);
    EXPECT_LT(gradcheck::relative_error(g, fd), 1e-5);
  }
}

TEST(GcnBackward, DuplicatedLabeledListKeepsMeanGradient) {
  std::mt19937_64 rng(9);
  const auto a = normalize_adjacency(build_graph(oracle::random_edges(8, 0.4, rng), 8));
  const Matrix x = oracle::random_matrix(8, 3, rng);
  const std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1};
  const auto p = init_gcn(3, 4, 3, 5);
  const std::vector<NodeId> once{1, 4, 6};
  const std::vector<NodeId> twice{1, 4, 6, 1, 4, 6};
  EXPECT_LT(gradcheck::relative_error(gcn_backward(p, a, x, labels, once), gcn_backward(p, a, x, labels, twice)), 1e-14);
  EXPECT_THROW(gcn_backward(p, a, x, labels, std::vector<NodeId>{}), InputError);
}

TEST(GcnBackward, SaturatedPredictionsHaveTinyGradient) {
  const auto a = normalize_adjacency(build_graph({}, 2));
  GcnParams p = init_gcn(2, 2, 2, 0).zeros_like();
  for (auto& w : p.weights)
    for (std::size_t i = 0; i < 2; ++i) w(i, i) = 1.0;
  const Matrix x{{40.0, 0.0}, {0.0, 40.0}};
  const std::vector<int> labels{0, 1};
  const std::vector<NodeId> labeled{0, 1};
  EXPECT_LT(std::sqrt(squared_l2(gcn_backward(p, a, x, labels, labeled))), 1e-6);
}

TEST(MlpBackward, CrossEntropyGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    auto pr = gradcheck::random_problem(rng);
    const auto acts = mlp_forward(pr.params, pr.x);
    const Matrix dz = supervised_logit_gradient(acts.logits, pr.labels, pr.labeled, pr.weights, 0.6, 0.2);
    const auto g = mlp_backward(pr.params, pr.x, acts, dz);
    const auto fd = finite_difference([&](const MlpParams& q) {
      return supervised_loss(mlp_forward(q, pr.x).logits, pr.labels, pr.labeled, pr.weights, 0.6, 0.2);
    }, pr.params);
    EXPECT_LT(gradcheck::relative_error(g, fd), 1e-5);
  }
}

TEST(AnalyticLd, StudentEqualToTeacherEverywhereGivesZero) {
  std::mt19937_64 rng(11);
  auto pr = gradcheck::random_problem(rng);
  Matrix x(pr.x.rows(), pr.x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) x(i, c) = pr.x(0, c);
  const Matrix same = mlp_forward(pr.params, x).logits;
  const auto g = analytic_ld_gradients(pr.params, x, same, pr.graph, pr.weights, 0.8, 0.4);
  EXPECT_LT(std::sqrt(squared_l2(g)), 1e-12);
}

TEST(AnalyticLd, ZeroCoefficientsGiveZeroBundle) {
  std::mt19937_64 rng(12);
  auto pr = gradcheck::random_problem(rng);
  EXPECT_EQ(squared_l2(analytic_ld_gradients(pr.params, pr.x, pr.teacher, pr.graph, pr.weights, 0.0, 0.0)), 0.0);
}

TEST(AnalyticLd, IsolatedNodesContributeNothing) {
  std::mt19937_64 rng(15);
  auto pr = gradcheck::random_problem(rng);
  const Graph empty = build_graph({}, pr.x.rows());
  EXPECT_EQ(squared_l2(analytic_ld_gradients(pr.params, pr.x, pr.teacher, empty, pr.weights, 0.8, 0.4)), 0.0);
}

TEST(AnalyticLd, MatchesFiniteDifferencesOfDistillLoss) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    auto pr = gradcheck::random_problem(rng, 12);
    const auto g = analytic_ld_gradients(pr.params, pr.x, pr.teacher, pr.graph, pr.weights, 0.8, 0.4);
    const auto fd = finite_difference([&](const MlpParams& q) {
      return distill_loss(mlp_forward(q, pr.x).logits, pr.teacher, pr.graph, pr.weights, 0.8, 0.4, 1.0);
    }, pr.params);
    EXPECT_LT(gradcheck::relative_error(g, fd), 1e-5);
  }
}

// One edge 1-2 with w_1 = 0: only node 1's term survives, scaled by w_2.
TEST(AnalyticLd, NeighborWeightIsScalarAmplifier) {
  std::mt19937_64 rng(14);
  auto pr = gradcheck::random_problem(rng);
  const std::vector<EdgePair> one{{1, 2}};
  const Graph g = build_graph(one, pr.x.rows());
  std::vector<double> w(pr.x.rows(), 0.0);
  w[2] = 1.0;
  const auto unit = analytic_ld_gradients(pr.params, pr.x, pr.teacher, g, w, 0.0, 1.0);
  ASSERT_GT(squared_l2(unit), 0.0);
  for (double s : {0.0, 0.25, 3.0}) {
    w[2] = s;
    auto scaled = unit;
    accumulate(scaled, unit, s - 1.0);
    EXPECT_LT(std::sqrt(squared_l2([&] {
                auto d = analytic_ld_gradients(pr.params, pr.x, pr.teacher, g, w, 0.0, 1.0);
                accumulate(d, scaled, -1.0);
                return d;
              }())),
              1e-12 * (1.0 + std::sqrt(squared_l2(unit))) * (1.0 + s));
  }
}

TEST(AnalyticLd, GammaOneKeepsGradientAtZeroWeights) {
  std::mt19937_64 rng(16);
  auto pr = gradcheck::random_problem(rng);
  const std::vector<double> zero(pr.x.rows(), 0.0);
  auto g = analytic_ld_gradients(pr.params, pr.x, pr.teacher, pr.graph, zero, 0.3, 0.9);
  const auto unit = analytic_ld_gradients(pr.params, pr.x, pr.teacher, pr.graph, zero, 1.0, 0.0);
  if (pr.graph.num_edges() > 0) EXPECT_GT(squared_l2(g), 0.0);
  accumulate(g, unit, -0.3);
  EXPECT_LT(std::sqrt(squared_l2(g)), 1e-12 * (1.0 + std::sqrt(squared_l2(unit))));
}

TEST(BackwardTotal, MatchesFiniteDifferencesAcrossTemperatures) {
  std::mt19937_64 rng(17);
  for (double tau : {0.5, 1.0, 2.0})
    for (double lambda : {0.0, 0.1, 0.7}) {
      auto pr = gradcheck::random_problem(rng, 12);
      LossWeights w;
      w.tau = tau;
      w.lambda = lambda;
      const auto g = backward_total(pr.params, pr.x, pr.labels, pr.labeled, pr.teacher, pr.graph, pr.weights, w);
      const auto fd = finite_difference([&](const MlpParams& q) {
        return mlp_total_loss(q, pr.x, pr.labels, pr.labeled, pr.teacher, pr.graph, pr.weights, w);
      }, pr.params);
      EXPECT_LT(gradcheck::relative_error(g, fd), 1e-5) << "tau=" << tau << " lambda=" << lambda;
    }
}

TEST(BackwardTotal, AgreesWithAnalyticLdAtUnitTemperature) {
  std::mt19937_64 rng(18);
  auto pr = gradcheck::random_problem(rng);
  LossWeights w;
  w.lambda = 0.0;
  const auto total = backward_total(pr.params, pr.x, pr.labels, pr.labeled, pr.teacher, pr.graph, pr.weights, w);
  const auto ld = analytic_ld_gradients(pr.params, pr.x, pr.teacher, pr.graph, pr.weights, w.gamma1, w.gamma2);
  EXPECT_LT(gradcheck::relative_error(total, ld), 1e-12);
}

TEST(BackwardTotal, LambdaOneIsExactlySupervised) {
  std::mt19937_64 rng(19);
  auto pr = gradcheck::random_problem(rng);
  LossWeights w;
  w.lambda = 1.0;
  const auto total = backward_total(pr.params, pr.x, pr.labels, pr.labeled, pr.teacher, pr.graph, pr.weights, w);
  const auto acts = mlp_forward(pr.params, pr.x);
  const auto sup = mlp_backward(pr.params, pr.x, acts,
                                supervised_logit_gradient(acts.logits, pr.labels, pr.labeled, pr.weights, w.delta1, w.delta2));
  EXPECT_EQ(total, sup);
  // A non-finite teacher is never touched.
  Matrix bad(pr.teacher.rows(), pr.teacher.cols(), std::nan(""));
  EXPECT_EQ(backward_total(pr.params, pr.x, pr.labels, pr.labeled, bad, pr.graph, pr.weights, w), sup);
}

TEST(Optimizer, FirstStepMovesEachCoordinateByLearningRate) {
  Flat p{{1.0, -2.0, 0.5}};
  auto state = make_optimizer(p, AdamOptions{.learning_rate = 0.1});
  optimizer_step(state, p, Flat{{3.0, -0.01, 0.0}});
  EXPECT_NEAR(p.theta[0], 0.9, 1e-9);
  EXPECT_NEAR(p.theta[1], -1.9, 1e-6);
  EXPECT_EQ(p.theta[2], 0.5);
  EXPECT_EQ(state.step, 1u);
}

TEST(Optimizer, DecoupledWeightDecayShrinksWithZeroGradient) {
  Flat p{{2.0}};
  auto state = make_optimizer(p, AdamOptions{.learning_rate = 0.1, .weight_decay = 0.5});
  optimizer_step(state, p, Flat{{0.0}});
  EXPECT_DOUBLE_EQ(p.theta[0], 2.0 - 0.1 * 0.5 * 2.0);
}

TEST(Optimizer, ConvergesOnQuadraticAndIsDeterministic) {
  auto run = [] {
    Flat p{{5.0, -3.0}};
    auto state = make_optimizer(p, AdamOptions{.learning_rate = 0.05});
    for (int t = 0; t < 2000; ++t) optimizer_step(state, p, Flat{{p.theta[0] - 1.0, 2.0 * (p.theta[1] + 1.0)}});
    return p.theta;
  };
  const auto a = run();
  EXPECT_NEAR(a[0], 1.0, 1e-3);
  EXPECT_NEAR(a[1], -1.0, 1e-3);
  EXPECT_EQ(a, run());
}

TEST(Optimizer, ShapeMismatchThrows) {
  Flat p{{1.0, 2.0}};
  auto state = make_optimizer(p, AdamOptions{});
  EXPECT_THROW(optimizer_step(state, p, Flat{{1.0}}), InputError);
}

TEST(Checkpoint, RoundTripsBitExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "infgrand_test_ckpt";
  std::filesystem::create_directories(dir);
  auto mlp = init_mlp(7, 5, 3, 21);
  mlp.b1[0] = 0.1 + 0.2;
  mlp.w2(0, 0) = -std::nextafter(1.0, 2.0);
  save_checkpoint(dir / "m.ckpt", mlp, {.seed = 21, .step = 40});
  CheckpointInfo info;
  EXPECT_EQ(load_mlp_checkpoint(dir / "m.ckpt", &info), mlp);
  EXPECT_EQ(info.seed, 21u);
  EXPECT_EQ(info.step, 40u);

  const auto gcn = init_gcn(6, 4, 2, 3, 3);
  save_checkpoint(dir / "g.ckpt", gcn);
  EXPECT_EQ(load_gcn_checkpoint(dir / "g.ckpt"), gcn);
  EXPECT_ANY_THROW(load_gcn_checkpoint(dir / "m.ckpt"));
  EXPECT_ANY_THROW(load_mlp_checkpoint(dir / "missing.ckpt"));
  std::filesystem::remove_all(dir);
}
