#include "infgrand/losses.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "infgrand/error.hpp"
#include "infgrand/softmax.hpp"

namespace infgrand {

void LossWeights::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (!(delta1 >= 0.0 && delta2 >= 0.0 && gamma1 >= 0.0 && gamma2 >= 0.0))
    throw InputError("delta1, delta2, gamma1, gamma2 must be non-negative");
}

double kl_divergence(std::span<const double> p_log, std::span<const double> q_log) {
  if (p_log.size() != q_log.size()) throw InputError("kl_divergence: length mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < p_log.size(); ++k) {
    if (p_log[k] == -std::numeric_limits<double>::infinity()) continue;  // 0 log 0 = 0
    total += std::exp(p_log[k]) * (p_log[k] - q_log[k]);
  }
  return total;
}

namespace {

void check_weights(std::span<const double> node_weights, std::size_t n) {
  if (node_weights.size() != n)
    throw InputError("node weight vector has " + std::to_string(node_weights.size()) +
                     " entries for " + std::to_string(n) + " nodes");
}

void check_supervised(const Matrix& logits, std::span<const int> labels,
                      std::span<const NodeId> labeled) {
  if (labeled.empty()) throw InputError("labeled node set is empty");
  for (NodeId i : labeled) {
    if (i >= logits.rows()) throw InputError("labeled node " + std::to_string(i) + " out of range");
    if (i >= labels.size() || labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= logits.cols())
      throw InputError("label of node " + std::to_string(i) + " is not a valid class");
  }
}

}  // namespace

double supervised_loss(const Matrix& student_logits, std::span<const int> labels,
                       std::span<const NodeId> labeled, std::span<const double> node_weights,
                       double delta1, double delta2) {
  check_supervised(student_logits, labels, labeled);
  check_weights(node_weights, student_logits.rows());
  std::vector<double> logp(student_logits.cols());
  double total = 0.0;
  for (NodeId i : labeled) {
    log_softmax_row(student_logits.row(i), 1.0, logp);
    total += (delta1 + delta2 * node_weights[i]) * -logp[labels[i]];
  }
  return total;
}

double distill_loss(const Matrix& student_logits, const Matrix& teacher_logits, const Graph& g,
                    std::span<const double> node_weights, double gamma1, double gamma2, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (student_logits.rows() != g.num_nodes() || teacher_logits.rows() != g.num_nodes() ||
      student_logits.cols() != teacher_logits.cols())
    throw InputError("distill_loss: logits do not match the graph");
  check_weights(node_weights, g.num_nodes());
  const Matrix ps = log_softmax_rows(student_logits, tau);
  const Matrix pt = log_softmax_rows(teacher_logits, tau);
  double total = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto nbrs = g.neighbors(i);
    if (nbrs.empty()) continue;
    const double inv_deg = 1.0 / static_cast<double>(nbrs.size());
    for (NodeId j : nbrs)
      total += (gamma1 + gamma2 * node_weights[j]) * inv_deg * kl_divergence(ps.row(i), pt.row(j));
  }
  return total;
}

double total_loss(double supervised, double distill, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  return lambda * supervised + (1.0 - lambda) * distill;
}

Matrix supervised_logit_gradient(const Matrix& student_logits, std::span<const int> labels,
                                 std::span<const NodeId> labeled,
                                 std::span<const double> node_weights, double delta1,
                                 double delta2) {
  check_supervised(student_logits, labels, labeled);
  check_weights(node_weights, student_logits.rows());
  Matrix grad(student_logits.rows(), student_logits.cols());
  std::vector<double> logp(student_logits.cols());
  for (NodeId i : labeled) {
    log_softmax_row(student_logits.row(i), 1.0, logp);
    const double w = delta1 + delta2 * node_weights[i];
    auto gi = grad.row(i);
    for (std::size_t c = 0; c < logp.size(); ++c)
      gi[c] += w * (std::exp(logp[c]) - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0));
  }
  return grad;
}

Matrix distill_logit_gradient(const Matrix& student_logits, const Matrix& teacher_logits,
                              const Graph& g, std::span<const double> node_weights, double gamma1,
                              double gamma2, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (student_logits.rows() != g.num_nodes() || teacher_logits.rows() != g.num_nodes() ||
      student_logits.cols() != teacher_logits.cols())
    throw InputError("distill_logit_gradient: logits do not match the graph");
  check_weights(node_weights, g.num_nodes());
  const Matrix ps = log_softmax_rows(student_logits, tau);
  const Matrix pt = log_softmax_rows(teacher_logits, tau);
  const std::size_t c = student_logits.cols();
  Matrix grad(student_logits.rows(), c);
  std::vector<double> prob(c);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto nbrs = g.neighbors(i);
    if (nbrs.empty()) continue;
    auto lp = ps.row(i);
    for (std::size_t k = 0; k < c; ++k) prob[k] = std::exp(lp[k]);
    const double inv_deg = 1.0 / static_cast<double>(nbrs.size());
    auto gi = grad.row(i);
    for (NodeId j : nbrs) {
      const double w = (gamma1 + gamma2 * node_weights[j]) * inv_deg / tau;
      auto lq = pt.row(j);
      const double kl = kl_divergence(lp, lq);
      for (std::size_t k = 0; k < c; ++k) gi[k] += w * prob[k] * (lp[k] - lq[k] - kl);
    }
  }
  return grad;
}

ObjectiveValue total_objective(const Matrix& student_logits, const Matrix& teacher_logits,
                               const Graph& g, std::span<const int> labels,
                               std::span<const NodeId> labeled,
                               std::span<const double> node_weights, const LossWeights& weights) {
  weights.validate();
  ObjectiveValue out;
  out.supervised = supervised_loss(student_logits, labels, labeled, node_weights, weights.delta1,
                                   weights.delta2);
  out.logit_gradient = supervised_logit_gradient(student_logits, labels, labeled, node_weights,
                                                 weights.delta1, weights.delta2);
  if (weights.lambda == 1.0) {
    out.total = out.supervised;
    return out;
  }
  for (double& v : out.logit_gradient.values()) v *= weights.lambda;
  out.distill = distill_loss(student_logits, teacher_logits, g, node_weights, weights.gamma1,
                             weights.gamma2, weights.tau);
  const Matrix gd = distill_logit_gradient(student_logits, teacher_logits, g, node_weights,
                                           weights.gamma1, weights.gamma2, weights.tau);
  axpy(1.0 - weights.lambda, gd, out.logit_gradient);
  out.total = total_loss(out.supervised, out.distill, weights.lambda);
  return out;
}

}  // namespace infgrand
