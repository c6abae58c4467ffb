#pragma once

#include <span>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

// Coefficients of the influence-weighted objective.
//   supervised:   sum_{i in labeled} (delta1 + delta2 * w_i) * CE_i
//   distillation: sum_i sum_{j in N(i)} (gamma1 + gamma2 * w_j) / |N(i)| * KL(s_i/tau || t_j/tau)
//   total:        lambda * supervised + (1 - lambda) * distillation
struct LossWeights {
  double lambda = 0.1;
  double delta1 = 0.6;
  double delta2 = 0.2;
  double gamma1 = 0.8;
  double gamma2 = 0.4;
  double tau = 1.0;

  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

// sum_k exp(p_k) (p_k - q_k) for log-probability rows p, q.
double kl_divergence(std::span<const double> p_log, std::span<const double> q_log);

double supervised_loss(const Matrix& student_logits, std::span<const int> labels,
                       std::span<const NodeId> labeled, std::span<const double> node_weights,
                       double delta1, double delta2);

double distill_loss(const Matrix& student_logits, const Matrix& teacher_logits, const Graph& g,
                    std::span<const double> node_weights, double gamma1, double gamma2, double tau);

double total_loss(double supervised, double distill, double lambda);

// d(supervised_loss)/d(student_logits).
Matrix supervised_logit_gradient(const Matrix& student_logits, std::span<const int> labels,
                                 std::span<const NodeId> labeled,
                                 std::span<const double> node_weights, double delta1, double delta2);

// d(distill_loss)/d(student_logits): per node i,
// (1/tau) * sum_j w_ij * p_i (.) (log p_i - log q_j - KL_ij).
Matrix distill_logit_gradient(const Matrix& student_logits, const Matrix& teacher_logits,
                              const Graph& g, std::span<const double> node_weights, double gamma1,
                              double gamma2, double tau);

struct ObjectiveValue {
  double supervised = 0.0;
  double distill = 0.0;
  double total = 0.0;
  Matrix logit_gradient;
};

// Loss and logit gradient of the full objective. The distillation term is
// skipped entirely when lambda == 1.
ObjectiveValue total_objective(const Matrix& student_logits, const Matrix& teacher_logits,
                               const Graph& g, std::span<const int> labels,
                               std::span<const NodeId> labeled,
                               std::span<const double> node_weights, const LossWeights& weights);

}  // namespace infgrand
