#pragma once

#include <span>

#include "infgrand/matrix.hpp"

namespace infgrand {

// Row-wise softmax of logits / temperature, stabilized by max subtraction.
Matrix softmax_rows(const Matrix& logits, double temperature = 1.0);
Matrix log_softmax_rows(const Matrix& logits, double temperature = 1.0);

void log_softmax_row(std::span<const double> logits, double temperature, std::span<double> out);

// diag(p) - p p^T for one probability row.
Matrix softmax_jacobian(std::span<const double> prob);

}  // namespace infgrand
