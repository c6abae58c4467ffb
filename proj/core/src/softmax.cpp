#include "infgrand/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "infgrand/error.hpp"

namespace infgrand {

void log_softmax_row(std::span<const double> logits, double temperature, std::span<double> out) {
  double peak = -INFINITY;
  for (double z : logits) peak = std::max(peak, z / temperature);
  double total = 0.0;
  for (double z : logits) total += std::exp(z / temperature - peak);
  const double log_total = std::log(total);
  for (std::size_t c = 0; c < logits.size(); ++c) out[c] = logits[c] / temperature - peak - log_total;
}

Matrix softmax_rows(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0)) throw InputError("softmax temperature must be positive");
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto z = logits.row(r);
    auto o = out.row(r);
    double peak = -INFINITY;
    for (double v : z) peak = std::max(peak, v / temperature);
    double total = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      o[c] = std::exp(z[c] / temperature - peak);
      total += o[c];
    }
    for (double& v : o) v /= total;
  }
  return out;
}

Matrix log_softmax_rows(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0)) throw InputError("softmax temperature must be positive");
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) log_softmax_row(logits.row(r), temperature, out.row(r));
  return out;
}

Matrix softmax_jacobian(std::span<const double> prob) {
  const std::size_t c = prob.size();
  Matrix j(c, c);
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) j(a, b) = (a == b ? prob[a] : 0.0) - prob[a] * prob[b];
  return j;
}

}  // namespace infgrand
