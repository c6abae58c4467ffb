#include "infgrand/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "infgrand/error.hpp"

namespace infgrand {

namespace {

void shuffle(std::vector<NodeId>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::vector<std::vector<NodeId>> by_class(std::span<const int> labels, std::size_t num_classes,
                                          std::span<const NodeId> nodes) {
  std::vector<std::vector<NodeId>> out(num_classes);
  for (NodeId v : nodes) {
    if (v >= labels.size()) throw InputError("node " + std::to_string(v) + " out of range");
    const int y = labels[v];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
      throw InputError("label of node " + std::to_string(v) + " outside [0, num_classes)");
    out[y].push_back(v);
  }
  return out;
}

std::vector<NodeId> all_nodes(std::size_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

// Takes per_class from each class of `pool`, returns them and leaves the rest in `pool`.
std::vector<NodeId> take_per_class(std::vector<NodeId>& pool, std::span<const int> labels,
                                   std::size_t num_classes, std::size_t per_class) {
  std::vector<std::size_t> taken(num_classes, 0);
  std::vector<NodeId> picked;
  std::vector<NodeId> rest;
  for (NodeId v : pool) {
    auto& t = taken[labels[v]];
    if (t < per_class) {
      ++t;
      picked.push_back(v);
    } else {
      rest.push_back(v);
    }
  }
  for (std::size_t c = 0; c < num_classes; ++c)
    if (taken[c] < per_class)
      throw InputError("class " + std::to_string(c) + " has " + std::to_string(taken[c]) +
                       " candidates, fewer than the " + std::to_string(per_class) + " requested");
  pool = std::move(rest);
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<NodeId> take(std::vector<NodeId>& pool, std::size_t count, const char* what) {
  if (count > pool.size())
    throw InputError(std::string("not enough nodes left for the ") + what + " set: need " +
                     std::to_string(count) + ", have " + std::to_string(pool.size()));
  std::vector<NodeId> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Split make_transductive_split(std::span<const int> labels, std::size_t num_classes,
                              std::size_t per_class, std::size_t val_size, std::size_t test_size,
                              std::uint64_t seed) {
  if (per_class == 0) throw InputError("per_class must be positive");
  std::mt19937_64 rng(seed);
  auto pool = all_nodes(labels.size());
  by_class(labels, num_classes, pool);  // label range check
  shuffle(pool, rng);
  Split s;
  s.labeled = take_per_class(pool, labels, num_classes, per_class);
  s.validation = take(pool, val_size, "validation");
  s.test = take(pool, test_size, "test");
  return s;
}

Split make_inductive_split(std::span<const int> labels, std::size_t num_classes,
                           double observed_fraction, std::size_t per_class, std::size_t val_size,
                           std::size_t test_size, std::uint64_t seed) {
  if (!(observed_fraction > 0.0 && observed_fraction <= 1.0))
    throw InputError("observed fraction must lie in (0, 1]");
  if (observed_fraction == 1.0) {
    Split s = make_transductive_split(labels, num_classes, per_class, val_size, test_size, seed);
    s.observed = all_nodes(labels.size());
    return s;
  }
  if (per_class == 0) throw InputError("per_class must be positive");
  const std::size_t n = labels.size();
  const auto n_observed = static_cast<std::size_t>(std::floor(observed_fraction * static_cast<double>(n)));
  if (n_observed == 0 || n_observed + test_size > n)
    throw InputError("degenerate inductive split: " + std::to_string(n_observed) + " observed + " +
                     std::to_string(test_size) + " test nodes out of " + std::to_string(n));
  if (test_size == 0) throw InputError("inductive split needs at least one test node");
  std::mt19937_64 rng(seed);
  auto pool = all_nodes(n);
  by_class(labels, num_classes, pool);
  shuffle(pool, rng);
  Split s;
  s.test = take(pool, test_size, "test");
  auto observed = take(pool, n_observed, "observed");
  s.observed = observed;
  shuffle(observed, rng);
  s.labeled = take_per_class(observed, labels, num_classes, per_class);
  s.validation = take(observed, val_size, "validation");
  return s;
}

SplitView make_view(const Dataset& data, const Split& split) {
  split.validate(data.num_nodes());
  SplitView v;
  const bool full = !split.observed || split.observed->size() == data.num_nodes();
  if (full) {
    v.train = data;
    v.train_split = split;
    v.train_split.observed.reset();
    v.eval = data;
    v.eval_test = split.test;
    v.train_ids = all_nodes(data.num_nodes());
    v.eval_ids = v.train_ids;
    return v;
  }
  v.inductive = true;
  std::vector<NodeId> observed = *split.observed;
  std::sort(observed.begin(), observed.end());
  std::vector<std::int64_t> local(data.num_nodes(), -1);
  for (std::size_t l = 0; l < observed.size(); ++l) local[observed[l]] = static_cast<std::int64_t>(l);
  auto remap = [&](const std::vector<NodeId>& ids, const char* what) {
    std::vector<NodeId> out;
    out.reserve(ids.size());
    for (NodeId id : ids) {
      if (local[id] < 0)
        throw InputError(std::string(what) + " node " + std::to_string(id) + " is not observed");
      out.push_back(static_cast<NodeId>(local[id]));
    }
    return out;
  };
  for (NodeId t : split.test)
    if (local[t] >= 0) throw InputError("test node " + std::to_string(t) + " is observed");
  v.train = data.induced(observed);
  v.train_ids = observed;
  v.train_split.labeled = remap(split.labeled, "labeled");
  v.train_split.validation = remap(split.validation, "validation");

  v.eval_ids = observed;
  v.eval_ids.insert(v.eval_ids.end(), split.test.begin(), split.test.end());
  v.eval = data.induced(v.eval_ids);
  v.eval_test.resize(split.test.size());
  std::iota(v.eval_test.begin(), v.eval_test.end(), static_cast<NodeId>(observed.size()));
  return v;
}

InfluenceSubsets influence_subsets(std::span<const int> labels, std::size_t num_classes,
                                   std::span<const NodeId> candidates,
                                   std::span<const double> scores, double fraction) {
  if (!(fraction > 0.0 && fraction <= 0.5)) throw InputError("fraction must lie in (0, 0.5]");
  auto classes = by_class(labels, num_classes, candidates);
  InfluenceSubsets out;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& members = classes[c];
    const auto take_n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size())));
    if (take_n == 0)
      throw InputError("class " + std::to_string(c) + " has too few candidates (" +
                       std::to_string(members.size()) + ") for fraction " + std::to_string(fraction));
    for (NodeId v : members)
      if (v >= scores.size()) throw InputError("no score for node " + std::to_string(v));
    auto high = members;
    std::stable_sort(high.begin(), high.end(), [&](NodeId a, NodeId b) {
      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    });
    auto low = members;
    std::stable_sort(low.begin(), low.end(), [&](NodeId a, NodeId b) {
      return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
    });
    out.high.insert(out.high.end(), high.begin(), high.begin() + static_cast<std::ptrdiff_t>(take_n));
    out.low.insert(out.low.end(), low.begin(), low.begin() + static_cast<std::ptrdiff_t>(take_n));
  }
  std::sort(out.high.begin(), out.high.end());
  std::sort(out.low.begin(), out.low.end());
  return out;
}

Split label_scarce_subset(const Split& split, std::span<const int> labels, std::size_t num_classes,
                          std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) throw InputError("per_class must be positive");
  std::mt19937_64 rng(seed);
  auto pool = split.labeled;
  by_class(labels, num_classes, pool);
  std::sort(pool.begin(), pool.end());
  shuffle(pool, rng);
  Split out = split;
  out.labeled = take_per_class(pool, labels, num_classes, per_class);
  return out;
}

}  // namespace infgrand
