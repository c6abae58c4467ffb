#include "infgrand/mlp.hpp"

#include <string>
#include <vector>

#include "infgrand/error.hpp"
#include "infgrand/softmax.hpp"

namespace infgrand {

namespace {

void check_input(const MlpParams& p, const Matrix& x) {
  p.validate();
  if (x.cols() != p.input_dim())
    throw InputError("MLP expects " + std::to_string(p.input_dim()) + " input features, got " +
                     std::to_string(x.cols()));
}

}  // namespace

MlpActivations mlp_forward(const MlpParams& p, const Matrix& x) {
  check_input(p, x);
  MlpActivations a;
  a.pre_hidden = matmul_bt(x, p.w1);
  add_row_vector(a.pre_hidden, p.b1);
  a.hidden = a.pre_hidden;
  for (double& v : a.hidden.values()) v = v > 0.0 ? v : 0.0;
  a.logits = matmul_bt(a.hidden, p.w2);
  add_row_vector(a.logits, p.b2);
  return a;
}

MlpActivations mlp_forward_train(const MlpParams& p, const Matrix& x, double dropout_rate,
                                 std::mt19937_64& rng) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InputError("dropout rate must lie in [0, 1)");
  if (dropout_rate == 0.0) return mlp_forward(p, x);
  check_input(p, x);
  MlpActivations a;
  a.pre_hidden = matmul_bt(x, p.w1);
  add_row_vector(a.pre_hidden, p.b1);
  a.dropout_scale = Matrix(a.pre_hidden.rows(), a.pre_hidden.cols());
  const double keep_scale = 1.0 / (1.0 - dropout_rate);
  for (double& s : a.dropout_scale.values()) s = uniform_unit(rng) < dropout_rate ? 0.0 : keep_scale;
  a.hidden = a.pre_hidden;
  auto h = a.hidden.values();
  auto s = a.dropout_scale.values();
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = h[i] > 0.0 ? h[i] * s[i] : 0.0;
  a.logits = matmul_bt(a.hidden, p.w2);
  add_row_vector(a.logits, p.b2);
  return a;
}

GradientBundle<MlpParams> mlp_backward(const MlpParams& p, const Matrix& x,
                                       const MlpActivations& acts, const Matrix& logit_gradient) {
  if (logit_gradient.rows() != x.rows() || logit_gradient.cols() != p.num_classes())
    throw InputError("mlp_backward: logit gradient shape mismatch");
  GradientBundle<MlpParams> g;
  g.w2 = matmul_at(logit_gradient, acts.hidden);
  g.b2 = column_sums(logit_gradient);
  Matrix d_pre = matmul(logit_gradient, p.w2);
  auto dv = d_pre.values();
  auto pre = acts.pre_hidden.values();
  const bool dropped = !acts.dropout_scale.empty();
  for (std::size_t i = 0; i < dv.size(); ++i) {
    if (pre[i] <= 0.0) dv[i] = 0.0;
    else if (dropped) dv[i] *= acts.dropout_scale.values()[i];
  }
  g.w1 = matmul_at(d_pre, x);
  g.b1 = column_sums(d_pre);
  return g;
}

GradientBundle<MlpParams> analytic_ld_gradients(const MlpParams& p, const Matrix& x,
                                                const Matrix& teacher_logits, const Graph& g,
                                                std::span<const double> node_weights,
                                                double gamma1, double gamma2) {
  if (g.num_nodes() == 0) throw InputError("analytic_ld_gradients: empty graph");
  if (x.rows() != g.num_nodes() || teacher_logits.rows() != g.num_nodes())
    throw InputError("analytic_ld_gradients: row counts do not match the graph");
  if (node_weights.size() != g.num_nodes())
    throw InputError("analytic_ld_gradients: node weight length mismatch");
  const MlpActivations acts = mlp_forward(p, x);
  if (teacher_logits.cols() != p.num_classes())
    throw InputError("analytic_ld_gradients: teacher class count mismatch");

  const std::size_t c = p.num_classes();
  const std::size_t f = p.hidden_dim();
  const std::size_t d = p.input_dim();
  const Matrix log_s = log_softmax_rows(acts.logits);
  const Matrix log_t = log_softmax_rows(teacher_logits);
  const Matrix s = softmax_rows(acts.logits);

  auto grad = p.zeros_like();
  std::vector<double> direction(c), u(c), back(f);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto nbrs = g.neighbors(i);
    if (nbrs.empty()) continue;
    const Matrix jac = softmax_jacobian(s.row(i));
    const double inv_deg = 1.0 / static_cast<double>(nbrs.size());
    for (NodeId j : nbrs) {
      const double w = (gamma1 + gamma2 * node_weights[j]) * inv_deg;
      for (std::size_t k = 0; k < c; ++k) direction[k] = log_s(i, k) - log_t(j, k) + 1.0;
      for (std::size_t a = 0; a < c; ++a) {
        double acc = 0.0;
        for (std::size_t b = 0; b < c; ++b) acc += jac(a, b) * direction[b];
        u[a] = acc;
      }
      for (std::size_t a = 0; a < c; ++a) {
        grad.b2[a] += w * u[a];
        for (std::size_t h = 0; h < f; ++h) grad.w2(a, h) += w * u[a] * acts.hidden(i, h);
      }
      for (std::size_t h = 0; h < f; ++h) {
        double acc = 0.0;
        if (acts.pre_hidden(i, h) > 0.0)
          for (std::size_t a = 0; a < c; ++a) acc += p.w2(a, h) * u[a];
        back[h] = acc;
      }
      for (std::size_t h = 0; h < f; ++h) {
        grad.b1[h] += w * back[h];
        for (std::size_t k = 0; k < d; ++k) grad.w1(h, k) += w * back[h] * x(i, k);
      }
    }
  }
  return grad;
}

GradientBundle<MlpParams> backward_total(const MlpParams& p, const Matrix& x,
                                         std::span<const int> labels,
                                         std::span<const NodeId> labeled,
                                         const Matrix& teacher_logits, const Graph& g,
                                         std::span<const double> node_weights,
                                         const LossWeights& weights) {
  weights.validate();
  const MlpActivations acts = mlp_forward(p, x);
  const auto objective =
      total_objective(acts.logits, teacher_logits, g, labels, labeled, node_weights, weights);
  return mlp_backward(p, x, acts, objective.logit_gradient);
}

double mlp_total_loss(const MlpParams& p, const Matrix& x, std::span<const int> labels,
                      std::span<const NodeId> labeled, const Matrix& teacher_logits,
                      const Graph& g, std::span<const double> node_weights,
                      const LossWeights& weights) {
  weights.validate();
  const Matrix logits = mlp_forward(p, x).logits;
  const double ls =
      supervised_loss(logits, labels, labeled, node_weights, weights.delta1, weights.delta2);
  if (weights.lambda == 1.0) return ls;
  const double ld = distill_loss(logits, teacher_logits, g, node_weights, weights.gamma1,
                                 weights.gamma2, weights.tau);
  return total_loss(ls, ld, weights.lambda);
}

}  // namespace infgrand
