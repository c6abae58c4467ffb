#pragma once

#include <random>
#include <span>

#include "infgrand/graph.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/matrix.hpp"
#include "infgrand/params.hpp"

namespace infgrand {

struct MlpActivations {
  Matrix pre_hidden;    // W1 x + b1
  Matrix hidden;        // relu(pre_hidden), times the dropout scale when training
  Matrix logits;        // W2 hidden + b2
  Matrix dropout_scale; // empty at evaluation; 0 or 1/(1-rate) per hidden unit
};

MlpActivations mlp_forward(const MlpParams& p, const Matrix& x);

// Inverted dropout on the hidden layer. rate == 0 is identical to mlp_forward.
MlpActivations mlp_forward_train(const MlpParams& p, const Matrix& x, double dropout_rate,
                                 std::mt19937_64& rng);

// Reverse pass for a given d(loss)/d(logits). ReLU subgradient is 0 at 0.
GradientBundle<MlpParams> mlp_backward(const MlpParams& p, const Matrix& x,
                                       const MlpActivations& acts, const Matrix& logit_gradient);

// Distillation-loss gradient at tau = 1, evaluated edge by edge through the
// explicit softmax Jacobian:
//   g_b2 += w J (log s_i - log t_j + 1)
//   g_W2 += w [J (...)] h_i^T
//   g_b1 += w relu'(.) (W2^T J (...))
//   g_W1 += w [relu'(.) (W2^T J (...))] x_i^T
// with w = (gamma1 + gamma2 * weight_j) / |N(i)|. Isolated nodes contribute nothing.
GradientBundle<MlpParams> analytic_ld_gradients(const MlpParams& p, const Matrix& x,
                                                const Matrix& teacher_logits, const Graph& g,
                                                std::span<const double> node_weights,
                                                double gamma1, double gamma2);

// Gradient of lambda * L_s + (1 - lambda) * L_d for any tau > 0, by
// reverse-mode composition through the logit gradients.
GradientBundle<MlpParams> backward_total(const MlpParams& p, const Matrix& x,
                                         std::span<const int> labels,
                                         std::span<const NodeId> labeled,
                                         const Matrix& teacher_logits, const Graph& g,
                                         std::span<const double> node_weights,
                                         const LossWeights& weights);

// Scalar objective evaluated from scratch; the target for finite differences.
double mlp_total_loss(const MlpParams& p, const Matrix& x, std::span<const int> labels,
                      std::span<const NodeId> labeled, const Matrix& teacher_logits,
                      const Graph& g, std::span<const double> node_weights,
                      const LossWeights& weights);

}  // namespace infgrand
