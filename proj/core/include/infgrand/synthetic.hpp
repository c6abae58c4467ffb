#pragma once

#include <cstddef>
#include <cstdint>

#include "infgrand/dataset.hpp"

namespace infgrand {

// Stochastic block model with one block per class and Gaussian class clusters.
struct SyntheticSpec {
  std::size_t num_nodes = 600;
  std::size_t num_classes = 3;
  std::size_t feature_dim = 16;
  double p_intra = 0.03;
  double p_inter = 0.002;
  double separation = 1.0;  // norm of each class center
  double noise = 1.0;       // per-coordinate standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

// Class of node i is a seeded shuffle of balanced assignments. Edge (i, j) is
// present with probability p_intra when the classes agree, p_inter otherwise.
Dataset generate_synthetic(const SyntheticSpec& spec);

// Fraction of undirected edges whose endpoints share a label; 0 on edgeless graphs.
double edge_homophily(const Dataset& data);

}  // namespace infgrand
