#pragma once

#include <cmath>
#include <cstdint>

#include "infgrand/error.hpp"
#include "infgrand/params.hpp"

namespace infgrand {

struct AdamOptions {
  double learning_rate = 0.01;
  double weight_decay = 0.0;  // decoupled: p <- p - lr * wd * p
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <ParameterSet P>
struct OptimizerState {
  AdamOptions options;
  P first_moment;
  P second_moment;
  std::uint64_t step = 0;
};

template <ParameterSet P>
OptimizerState<P> make_optimizer(const P& params, const AdamOptions& options) {
  return {options, params.zeros_like(), params.zeros_like(), 0};
}

// One AdamW update; deterministic given state, parameters and gradient.
template <ParameterSet P>
void optimizer_step(OptimizerState<P>& state, P& params, const GradientBundle<P>& grad) {
  auto pb = params.blocks();
  auto gb = grad.blocks();
  auto mb = state.first_moment.blocks();
  auto vb = state.second_moment.blocks();
  if (pb.size() != gb.size() || pb.size() != mb.size())
    throw InputError("optimizer_step: parameter/gradient block count mismatch");
  const auto& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(o.beta1, t);
  const double bias2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t b = 0; b < pb.size(); ++b) {
    if (pb[b].size() != gb[b].size() || pb[b].size() != mb[b].size())
      throw InputError("optimizer_step: block shape mismatch");
    for (std::size_t i = 0; i < pb[b].size(); ++i) {
      const double g = gb[b][i];
      mb[b][i] = o.beta1 * mb[b][i] + (1.0 - o.beta1) * g;
      vb[b][i] = o.beta2 * vb[b][i] + (1.0 - o.beta2) * g * g;
      const double m_hat = mb[b][i] / bias1;
      const double v_hat = vb[b][i] / bias2;
      if (o.weight_decay != 0.0) pb[b][i] -= o.learning_rate * o.weight_decay * pb[b][i];
      pb[b][i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace infgrand
