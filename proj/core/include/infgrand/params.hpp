#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "infgrand/matrix.hpp"

namespace infgrand {

// Anything exposing its parameters as a fixed list of flat blocks. Gradients,
// optimizer moments and finite differences are all expressed through this.
template <class P>
concept ParameterSet = requires(P p, const P cp) {
  { p.blocks() } -> std::same_as<std::vector<std::span<double>>>;
  { cp.blocks() } -> std::same_as<std::vector<std::span<const double>>>;
  { cp.zeros_like() } -> std::same_as<P>;
};

// Gradients share the shape of the parameters they differentiate.
template <ParameterSet P>
using GradientBundle = P;

// Student: logits = W2 relu(W1 x + b1) + b2.
struct MlpParams {
  Matrix w1;  // hidden x input
  Vector b1;  // hidden
  Matrix w2;  // classes x hidden
  Vector b2;  // classes

  std::size_t input_dim() const noexcept { return w1.cols(); }
  std::size_t hidden_dim() const noexcept { return w1.rows(); }
  std::size_t num_classes() const noexcept { return w2.rows(); }

  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  MlpParams zeros_like() const;
  void validate() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// Teacher GCN: H_l = relu(A H_{l-1} W_l + b_l), no activation after the last layer.
struct GcnParams {
  std::vector<Matrix> weights;  // in x out per layer
  std::vector<Vector> biases;   // out per layer

  std::size_t num_layers() const noexcept { return weights.size(); }
  std::size_t input_dim() const noexcept { return weights.front().rows(); }
  std::size_t num_classes() const noexcept { return weights.back().cols(); }

  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  GcnParams zeros_like() const;
  void validate() const;

  friend bool operator==(const GcnParams&, const GcnParams&) = default;
};

inline double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// Uniform double in [0, 1) with 53 random bits; identical on every stdlib.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Glorot-uniform weights and zero biases from a seeded mt19937_64.
MlpParams init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                   std::uint64_t seed);
GcnParams init_gcn(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                   std::uint64_t seed, std::size_t num_layers = 2);

template <ParameterSet P>
void accumulate(P& into, const P& g, double scale = 1.0) {
  auto dst = into.blocks();
  auto src = g.blocks();
  for (std::size_t b = 0; b < dst.size(); ++b)
    for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += scale * src[b][i];
}

template <ParameterSet P>
double squared_l2(const P& p) {
  double s = 0.0;
  for (auto block : p.blocks())
    for (double v : block) s += v * v;
  return s;
}

template <ParameterSet P>
bool all_finite(const P& p) {
  for (auto block : p.blocks())
    if (!all_finite(block)) return false;
  return true;
}

}  // namespace infgrand
