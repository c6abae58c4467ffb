#pragma once

#include <random>
#include <span>
#include <vector>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"
#include "infgrand/params.hpp"

namespace infgrand {

struct GcnActivations {
  std::vector<Matrix> layer_inputs;   // H_{l-1}, one per layer (first is X)
  std::vector<Matrix> pre;            // A (H_{l-1} W_l) + b_l
  std::vector<Matrix> dropout_scale;  // per hidden layer; empty entries at evaluation
  Matrix logits;
};

// Logits of the stacked GCN; no dropout.
Matrix gcn_forward(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x);

// Forward pass that records activations. Dropout (rate > 0) is applied to the
// hidden representations and requires an rng.
GcnActivations gcn_forward_train(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                                 double dropout_rate = 0.0, std::mt19937_64* rng = nullptr);

GradientBundle<GcnParams> gcn_backward_from(const GcnParams& p, const NormalizedAdjacency& a,
                                            const GcnActivations& acts,
                                            const Matrix& logit_gradient);

// Mean cross-entropy over the labeled list (duplicates count as listed).
double gcn_loss(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                std::span<const int> labels, std::span<const NodeId> labeled);

// Gradient of gcn_loss.
GradientBundle<GcnParams> gcn_backward(const GcnParams& p, const NormalizedAdjacency& a,
                                       const Matrix& x, std::span<const int> labels,
                                       std::span<const NodeId> labeled);

// d(mean CE)/d(logits), zero outside the labeled rows.
Matrix mean_ce_logit_gradient(const Matrix& logits, std::span<const int> labels,
                              std::span<const NodeId> labeled);
double mean_cross_entropy(const Matrix& logits, std::span<const int> labels,
                          std::span<const NodeId> nodes);

}  // namespace infgrand
