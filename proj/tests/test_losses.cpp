#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infgrand/error.hpp"
#include "infgrand/graph.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/softmax.hpp"
#include "oracles.hpp"

using namespace infgrand;

namespace {

double ce_sum(const Matrix& logits, const std::vector<int>& labels, const std::vector<NodeId>& nodes) {
  double s = 0.0;
  for (NodeId i : nodes) s -= oracle::log_softmax(oracle::row(logits, i))[labels[i]];
  return s;
}

// Straight transcription of the neighbor-averaged weighted KL sum.
double distill_oracle(const Matrix& s, const Matrix& t, const oracle::Dense& a, const std::vector<double>& w,
                      double g1, double g2, double tau) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) deg += a[i][j];
    if (deg == 0.0) continue;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != 0.0)
        total += (g1 + g2 * w[j]) / deg *
                 oracle::kl(oracle::log_softmax(oracle::row(s, i), tau), oracle::log_softmax(oracle::row(t, j), tau));
  }
  return total;
}

}  // namespace

TEST(KlDivergence, ClosedForms) {
  const std::vector<double> p{0.1, 0.2, 0.7};
  std::vector<double> lp;
  for (double v : p) lp.push_back(std::log(v));
  EXPECT_EQ(kl_divergence(lp, lp), 0.0);
  const std::vector<double> one_hot{0.0, -INFINITY};
  const std::vector<double> uniform{std::log(0.5), std::log(0.5)};
  EXPECT_NEAR(kl_divergence(one_hot, uniform), std::log(2.0), 1e-15);
  EXPECT_THROW(kl_divergence(lp, uniform), InputError);
}

TEST(KlDivergence, NonNegativeOnRandomRows) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) {
    const Matrix z = oracle::random_matrix(2, 2 + t % 6, rng, -8.0, 8.0);
    const Matrix l = log_softmax_rows(z);
    EXPECT_GE(kl_divergence(l.row(0), l.row(1)), -1e-12);
  }
}

TEST(SupervisedLoss, ClosedFormsAndOracle) {
  const std::vector<double> w{0.3};
  EXPECT_NEAR(supervised_loss(Matrix{{0.0, 0.0, 0.0, 0.0}}, std::vector<int>{2}, std::vector<NodeId>{0}, w, 1.0, 0.0),
              std::log(4.0), 1e-15);
  EXPECT_NEAR(supervised_loss(Matrix{{800.0, 0.0}}, std::vector<int>{0}, std::vector<NodeId>{0}, w, 1.0, 1.0), 0.0, 1e-300);

  std::mt19937_64 rng(2);
  const Matrix z = oracle::random_matrix(10, 4, rng, -3.0, 3.0);
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(i % 4);
  const std::vector<NodeId> nodes{0, 3, 4, 9};
  std::vector<double> gis(10, 0.7);
  EXPECT_NEAR(supervised_loss(z, labels, nodes, gis, 0.6, 0.0), 0.6 * ce_sum(z, labels, nodes), 1e-12);
  EXPECT_NEAR(supervised_loss(z, labels, nodes, gis, 0.6, 0.2), (0.6 + 0.2 * 0.7) * ce_sum(z, labels, nodes), 1e-12);
}

TEST(SupervisedLoss, RejectsBadInput) {
  const Matrix z{{0.0, 1.0}};
  const std::vector<double> w{1.0};
  EXPECT_THROW(supervised_loss(z, std::vector<int>{0}, std::vector<NodeId>{}, w, 1.0, 0.0), InputError);
  EXPECT_THROW(supervised_loss(z, std::vector<int>{2}, std::vector<NodeId>{0}, w, 1.0, 0.0), InputError);
  EXPECT_THROW(supervised_loss(z, std::vector<int>{0}, std::vector<NodeId>{1}, w, 1.0, 0.0), InputError);
}

TEST(DistillLoss, TrivialZeros) {
  const std::vector<EdgePair> path{{0, 1}, {1, 2}};
  const Graph g = build_graph(path, 3);
  const Matrix same{{0.3, -0.2}, {0.3, -0.2}, {0.3, -0.2}};
  const std::vector<double> w{0.2, 0.5, 1.0};
  for (double tau : {0.25, 1.0, 4.0}) EXPECT_EQ(distill_loss(same, same, g, w, 0.8, 0.4, tau), 0.0);
  const Matrix other{{1.0, 0.0}, {0.0, 1.0}, {2.0, -1.0}};
  EXPECT_EQ(distill_loss(other, same, g, w, 0.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(distill_loss(other, same, build_graph({}, 3), w, 0.8, 0.4, 1.0), 0.0);
  EXPECT_THROW(distill_loss(other, same, g, w, 0.8, 0.4, 0.0), InputError);
}

// Path 0-1-2, tau = 1, gamma1 = 1, gamma2 = 0.
TEST(DistillLoss, PathGraphHandComputation) {
  const std::vector<EdgePair> path{{0, 1}, {1, 2}};
  const Graph g = build_graph(path, 3);
  const Matrix s{{1.0, 0.0}, {0.0, 0.0}, {-1.0, 2.0}};
  const Matrix t{{0.0, 1.0}, {2.0, 0.0}, {0.5, 0.5}};
  auto lsm = [](double a, double b) {
    const double m = std::max(a, b);
    const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    return std::vector<double>{a - lse, b - lse};
  };
  auto kl2 = [&](std::vector<double> p, std::vector<double> q) {
    return std::exp(p[0]) * (p[0] - q[0]) + std::exp(p[1]) * (p[1] - q[1]);
  };
  const auto s0 = lsm(1, 0), s1 = lsm(0, 0), s2 = lsm(-1, 2);
  const auto t0 = lsm(0, 1), t1 = lsm(2, 0), t2 = lsm(0.5, 0.5);
  const double expected = kl2(s0, t1) + 0.5 * (kl2(s1, t0) + kl2(s1, t2)) + kl2(s2, t1);
  const std::vector<double> w{0.9, 0.1, 0.4};
  EXPECT_NEAR(distill_loss(s, t, g, w, 1.0, 0.0, 1.0), expected, 1e-10);
}

TEST(DistillLoss, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    const auto edges = oracle::random_edges(n, 0.3, rng);
    const Matrix s = oracle::random_matrix(n, 3, rng, -3.0, 3.0);
    const Matrix t = oracle::random_matrix(n, 3, rng, -3.0, 3.0);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    const double tau = 0.5 + u(rng) * 2.0;
    const double got = distill_loss(s, t, build_graph(edges, n), w, 0.8, 0.4, tau);
    EXPECT_NEAR(got, distill_oracle(s, t, oracle::adjacency(n, edges), w, 0.8, 0.4, tau), 1e-10 * (1.0 + got));
  }
}

TEST(DistillLoss, ConstantWeightsScaleUniformLoss) {
  std::mt19937_64 rng(4);
  const auto edges = oracle::random_edges(12, 0.3, rng);
  const Graph g = build_graph(edges, 12);
  const Matrix s = oracle::random_matrix(12, 4, rng, -2.0, 2.0);
  const Matrix t = oracle::random_matrix(12, 4, rng, -2.0, 2.0);
  const std::vector<double> ones(12, 1.0);
  const double uniform = distill_loss(s, t, g, ones, 1.0, 0.0, 1.0);
  for (double kappa : {0.0, 0.3, 1.0}) {
    const std::vector<double> w(12, kappa);
    EXPECT_NEAR(distill_loss(s, t, g, w, 0.8, 0.4, 1.0), (0.8 + 0.4 * kappa) * uniform, 1e-12 * (1.0 + uniform));
  }
}

TEST(DistillLoss, MonotoneInEachWeight) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Graph g = build_graph(oracle::random_edges(10, 0.35, rng), 10);
  const Matrix s = oracle::random_matrix(10, 3, rng, -2.0, 2.0);
  const Matrix t = oracle::random_matrix(10, 3, rng, -2.0, 2.0);
  std::vector<double> w(10);
  for (double& v : w) v = u(rng);
  const double base = distill_loss(s, t, g, w, 0.8, 0.4, 1.0);
  for (std::size_t j = 0; j < 10; ++j) {
    auto up = w;
    up[j] += 0.5;
    EXPECT_GE(distill_loss(s, t, g, up, 0.8, 0.4, 1.0), base - 1e-12);
  }
}

TEST(DistillLoss, InvariantToPerRowLogitShift) {
  std::mt19937_64 rng(6);
  const Graph g = build_graph(oracle::random_edges(8, 0.4, rng), 8);
  Matrix s = oracle::random_matrix(8, 3, rng);
  const Matrix t = oracle::random_matrix(8, 3, rng);
  const std::vector<double> w(8, 0.5);
  const double base = distill_loss(s, t, g, w, 0.8, 0.4, 1.5);
  for (std::size_t i = 0; i < 8; ++i)
    for (double& v : s.row(i)) v += 10.0 * static_cast<double>(i);
  EXPECT_NEAR(distill_loss(s, t, g, w, 0.8, 0.4, 1.5), base, 1e-10);
}

TEST(TotalLoss, Arithmetic) {
  EXPECT_EQ(total_loss(2.0, 4.0, 1.0), 2.0);
  EXPECT_EQ(total_loss(2.0, 4.0, 0.0), 4.0);
  EXPECT_EQ(total_loss(2.0, 4.0, 0.5), 3.0);
  EXPECT_THROW(total_loss(2.0, 4.0, 1.5), InputError);
  EXPECT_THROW(total_loss(2.0, 4.0, -0.1), InputError);
}

TEST(LossWeights, Validation) {
  EXPECT_NO_THROW(LossWeights{}.validate());
  EXPECT_THROW((LossWeights{.lambda = 1.1}.validate()), InputError);
  EXPECT_THROW((LossWeights{.tau = 0.0}.validate()), InputError);
  EXPECT_THROW((LossWeights{.gamma2 = -0.1}.validate()), InputError);
}

TEST(LogitGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  const std::size_t n = 9;
  const Graph g = build_graph(oracle::random_edges(n, 0.35, rng), n);
  const Matrix s = oracle::random_matrix(n, 3, rng, -2.0, 2.0);
  const Matrix t = oracle::random_matrix(n, 3, rng, -2.0, 2.0);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(i) / n;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(i % 3));
  const std::vector<NodeId> labeled{0, 1, 5};
  for (double tau : {0.5, 2.0}) {
    const Matrix gd = distill_logit_gradient(s, t, g, w, 0.8, 0.4, tau);
    const Matrix gs = supervised_logit_gradient(s, labels, labeled, w, 0.6, 0.2);
    const double h = 1e-6;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 3; ++k) {
        Matrix up = s, down = s;
        up(i, k) += h;
        down(i, k) -= h;
        EXPECT_NEAR((distill_loss(up, t, g, w, 0.8, 0.4, tau) - distill_loss(down, t, g, w, 0.8, 0.4, tau)) / (2 * h),
                    gd(i, k), 1e-6);
        EXPECT_NEAR((supervised_loss(up, labels, labeled, w, 0.6, 0.2) -
                     supervised_loss(down, labels, labeled, w, 0.6, 0.2)) / (2 * h),
                    gs(i, k), 1e-6);
      }
  }
}

TEST(TotalObjective, CombinesTermsAndSkipsDistillAtLambdaOne) {
  std::mt19937_64 rng(8);
  const Graph g = build_graph(oracle::random_edges(6, 0.5, rng), 6);
  const Matrix s = oracle::random_matrix(6, 2, rng);
  const Matrix t = oracle::random_matrix(6, 2, rng);
  const std::vector<int> labels{0, 1, 0, 1, 0, 1};
  const std::vector<NodeId> labeled{0, 3};
  const std::vector<double> w(6, 0.5);
  LossWeights lw;
  const auto v = total_objective(s, t, g, labels, labeled, w, lw);
  EXPECT_NEAR(v.supervised, supervised_loss(s, labels, labeled, w, lw.delta1, lw.delta2), 1e-15);
  EXPECT_NEAR(v.distill, distill_loss(s, t, g, w, lw.gamma1, lw.gamma2, lw.tau), 1e-15);
  EXPECT_NEAR(v.total, lw.lambda * v.supervised + (1 - lw.lambda) * v.distill, 1e-15);
  lw.lambda = 1.0;
  const auto only = total_objective(s, t, g, labels, labeled, w, lw);
  EXPECT_EQ(only.distill, 0.0);
  EXPECT_EQ(only.total, only.supervised);
  EXPECT_EQ(only.logit_gradient, supervised_logit_gradient(s, labels, labeled, w, lw.delta1, lw.delta2));
}
