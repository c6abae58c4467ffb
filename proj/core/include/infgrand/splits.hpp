#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "infgrand/dataset.hpp"

namespace infgrand {

// per_class labeled nodes from every class, then val_size and test_size nodes
// drawn uniformly from the remainder.
Split make_transductive_split(std::span<const int> labels, std::size_t num_classes,
                              std::size_t per_class, std::size_t val_size, std::size_t test_size,
                              std::uint64_t seed);

// test_size nodes are held out as unseen test nodes; the observed set is an
// observed_fraction share of all nodes drawn from the rest, and labeled and
// validation nodes are drawn from it. observed_fraction == 1 with test_size
// taken from the observed nodes gives a transductive split.
Split make_inductive_split(std::span<const int> labels, std::size_t num_classes,
                           double observed_fraction, std::size_t per_class, std::size_t val_size,
                           std::size_t test_size, std::uint64_t seed);

// The two graphs of a split. For transductive splits both are the full
// dataset. For inductive splits `train` is induced by the observed nodes and
// `eval` by observed plus test nodes, with test ids remapped into it.
struct SplitView {
  Dataset train;
  Split train_split;              // labeled / validation / test in train-local ids
  Dataset eval;
  std::vector<NodeId> eval_test;  // test nodes in eval-local ids
  std::vector<NodeId> train_ids;  // train-local -> original
  std::vector<NodeId> eval_ids;   // eval-local -> original
  bool inductive = false;
};

SplitView make_view(const Dataset& data, const Split& split);

struct InfluenceSubsets {
  std::vector<NodeId> high;
  std::vector<NodeId> low;
};

// Per class, the floor(fraction * n_c) candidates with the largest and the
// smallest scores. Ties are broken toward the lower node index on both sides.
InfluenceSubsets influence_subsets(std::span<const int> labels, std::size_t num_classes,
                                   std::span<const NodeId> candidates,
                                   std::span<const double> scores, double fraction);

// Class-balanced subsample of split.labeled; validation and test untouched.
Split label_scarce_subset(const Split& split, std::span<const int> labels, std::size_t num_classes,
                          std::size_t per_class, std::uint64_t seed);

}  // namespace infgrand
