#pragma once

#include "infgrand/params.hpp"

namespace infgrand {

// Central differences (loss(p + h e) - loss(p - h e)) / 2h, one coordinate at a time.
template <ParameterSet P, class LossFn>
GradientBundle<P> finite_difference(LossFn&& loss, const P& params, double h = 1e-6) {
  P probe = params;
  GradientBundle<P> grad = params.zeros_like();
  auto pb = probe.blocks();
  auto gb = grad.blocks();
  for (std::size_t b = 0; b < pb.size(); ++b) {
    for (std::size_t i = 0; i < pb[b].size(); ++i) {
      const double original = pb[b][i];
      pb[b][i] = original + h;
      const double up = loss(static_cast<const P&>(probe));
      pb[b][i] = original - h;
      const double down = loss(static_cast<const P&>(probe));
      pb[b][i] = original;
      gb[b][i] = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace infgrand
