#include "infgrand/gcn.hpp"

#include <cmath>
#include <string>

#include "infgrand/error.hpp"
#include "infgrand/softmax.hpp"

namespace infgrand {

namespace {

void check(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x) {
  p.validate();
  if (a.num_nodes != x.rows()) throw InputError("GCN: adjacency and features disagree on node count");
  if (x.cols() != p.input_dim())
    throw InputError("GCN expects " + std::to_string(p.input_dim()) + " input features, got " +
                     std::to_string(x.cols()));
}

Matrix layer_pre(const GcnParams& p, std::size_t l, const NormalizedAdjacency& a, const Matrix& h) {
  Matrix z = spmm(a, matmul(h, p.weights[l]));
  add_row_vector(z, p.biases[l]);
  return z;
}

void check_labeled(std::size_t rows, std::size_t classes, std::span<const int> labels,
                   std::span<const NodeId> labeled) {
  if (labeled.empty()) throw InputError("labeled node set is empty");
  for (NodeId i : labeled)
    if (i >= rows || i >= labels.size() || labels[i] < 0 ||
        static_cast<std::size_t>(labels[i]) >= classes)
      throw InputError("labeled node " + std::to_string(i) + " has no valid label");
}

}  // namespace

Matrix gcn_forward(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x) {
  check(p, a, x);
  Matrix h = x;
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    Matrix z = layer_pre(p, l, a, h);
    if (l + 1 < p.num_layers())
      for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
    h = std::move(z);
  }
  return h;
}

GcnActivations gcn_forward_train(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                                 double dropout_rate, std::mt19937_64* rng) {
  check(p, a, x);
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InputError("dropout rate must lie in [0, 1)");
  if (dropout_rate > 0.0 && rng == nullptr) throw InputError("dropout requires a random generator");
  GcnActivations acts;
  Matrix h = x;
  const double keep_scale = 1.0 / (1.0 - dropout_rate);
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    acts.layer_inputs.push_back(h);
    Matrix z = layer_pre(p, l, a, h);
    acts.pre.push_back(z);
    if (l + 1 == p.num_layers()) {
      acts.logits = std::move(z);
      break;
    }
    Matrix scale;
    if (dropout_rate > 0.0) {
      scale = Matrix(z.rows(), z.cols());
      for (double& s : scale.values()) s = uniform_unit(*rng) < dropout_rate ? 0.0 : keep_scale;
    }
    auto zv = z.values();
    for (std::size_t i = 0; i < zv.size(); ++i) {
      zv[i] = zv[i] > 0.0 ? zv[i] : 0.0;
      if (!scale.empty()) zv[i] *= scale.values()[i];
    }
    acts.dropout_scale.push_back(std::move(scale));
    h = std::move(z);
  }
  return acts;
}

GradientBundle<GcnParams> gcn_backward_from(const GcnParams& p, const NormalizedAdjacency& a,
                                            const GcnActivations& acts,
                                            const Matrix& logit_gradient) {
  auto grad = p.zeros_like();
  Matrix d_pre = logit_gradient;
  for (std::size_t l = p.num_layers(); l-- > 0;) {
    grad.biases[l] = column_sums(d_pre);
    // A is symmetric, so A^T d_pre = A d_pre.
    const Matrix d_proj = spmm(a, d_pre);
    grad.weights[l] = matmul_at(acts.layer_inputs[l], d_proj);
    if (l == 0) break;
    Matrix d_h = matmul_bt(d_proj, p.weights[l]);
    auto dv = d_h.values();
    auto pre = acts.pre[l - 1].values();
    const Matrix& scale = acts.dropout_scale[l - 1];
    for (std::size_t i = 0; i < dv.size(); ++i) {
      if (pre[i] <= 0.0) dv[i] = 0.0;
      else if (!scale.empty()) dv[i] *= scale.values()[i];
    }
    d_pre = std::move(d_h);
  }
  return grad;
}

double mean_cross_entropy(const Matrix& logits, std::span<const int> labels,
                          std::span<const NodeId> nodes) {
  check_labeled(logits.rows(), logits.cols(), labels, nodes);
  std::vector<double> logp(logits.cols());
  double total = 0.0;
  for (NodeId i : nodes) {
    log_softmax_row(logits.row(i), 1.0, logp);
    total -= logp[labels[i]];
  }
  return total / static_cast<double>(nodes.size());
}

Matrix mean_ce_logit_gradient(const Matrix& logits, std::span<const int> labels,
                              std::span<const NodeId> labeled) {
  check_labeled(logits.rows(), logits.cols(), labels, labeled);
  Matrix grad(logits.rows(), logits.cols());
  std::vector<double> logp(logits.cols());
  const double inv = 1.0 / static_cast<double>(labeled.size());
  for (NodeId i : labeled) {
    log_softmax_row(logits.row(i), 1.0, logp);
    auto gi = grad.row(i);
    for (std::size_t c = 0; c < logp.size(); ++c)
      gi[c] += inv * (std::exp(logp[c]) - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0));
  }
  return grad;
}

double gcn_loss(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                std::span<const int> labels, std::span<const NodeId> labeled) {
  return mean_cross_entropy(gcn_forward(p, a, x), labels, labeled);
}

GradientBundle<GcnParams> gcn_backward(const GcnParams& p, const NormalizedAdjacency& a,
                                       const Matrix& x, std::span<const int> labels,
                                       std::span<const NodeId> labeled) {
  const auto acts = gcn_forward_train(p, a, x);
  return gcn_backward_from(p, a, acts, mean_ce_logit_gradient(acts.logits, labels, labeled));
}

}  // namespace infgrand
