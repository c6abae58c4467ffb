#include "infgrand/params.hpp"

#include <string>

#include "infgrand/error.hpp"

namespace infgrand {

std::vector<std::span<double>> MlpParams::blocks() {
  return {w1.values(), std::span<double>(b1), w2.values(), std::span<double>(b2)};
}

std::vector<std::span<const double>> MlpParams::blocks() const {
  return {w1.values(), std::span<const double>(b1), w2.values(), std::span<const double>(b2)};
}

MlpParams MlpParams::zeros_like() const {
  return {Matrix(w1.rows(), w1.cols()), Vector(b1.size(), 0.0), Matrix(w2.rows(), w2.cols()),
          Vector(b2.size(), 0.0)};
}

void MlpParams::validate() const {
  if (b1.size() != w1.rows() || w2.cols() != w1.rows() || b2.size() != w2.rows())
    throw InputError("MLP parameter shapes are inconsistent");
}

std::vector<std::span<double>> GcnParams::blocks() {
  std::vector<std::span<double>> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back(weights[l].values());
    out.push_back(biases[l]);
  }
  return out;
}

std::vector<std::span<const double>> GcnParams::blocks() const {
  std::vector<std::span<const double>> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back(weights[l].values());
    out.push_back(biases[l]);
  }
  return out;
}

GcnParams GcnParams::zeros_like() const {
  GcnParams z;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    z.weights.emplace_back(weights[l].rows(), weights[l].cols());
    z.biases.emplace_back(biases[l].size(), 0.0);
  }
  return z;
}

void GcnParams::validate() const {
  if (weights.empty() || weights.size() != biases.size())
    throw InputError("GCN needs one bias per weight matrix and at least one layer");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].size() != weights[l].cols())
      throw InputError("GCN layer " + std::to_string(l) + " bias length mismatch");
    if (l > 0 && weights[l].rows() != weights[l - 1].cols())
      throw InputError("GCN layer " + std::to_string(l) + " input width mismatch");
  }
}

namespace {

Matrix glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out,
              std::mt19937_64& rng) {
  const double bound = glorot_bound(fan_in, fan_out);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = (2.0 * uniform_unit(rng) - 1.0) * bound;
  return m;
}

}  // namespace

MlpParams init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                   std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes == 0)
    throw InputError("init_mlp: dimensions must be positive");
  std::mt19937_64 rng(seed);
  MlpParams p;
  p.w1 = glorot(hidden_dim, input_dim, input_dim, hidden_dim, rng);
  p.b1.assign(hidden_dim, 0.0);
  p.w2 = glorot(num_classes, hidden_dim, hidden_dim, num_classes, rng);
  p.b2.assign(num_classes, 0.0);
  return p;
}

GcnParams init_gcn(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                   std::uint64_t seed, std::size_t num_layers) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes == 0 || num_layers == 0)
    throw InputError("init_gcn: dimensions must be positive");
  std::mt19937_64 rng(seed);
  GcnParams p;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    const std::size_t out = l + 1 == num_layers ? num_classes : hidden_dim;
    p.weights.push_back(glorot(in, out, in, out, rng));
    p.biases.emplace_back(out, 0.0);
  }
  return p;
}

}  // namespace infgrand
