#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

// Node index sets of one experiment. The evaluation sets are pairwise
// disjoint; `observed` is present only for inductive splits.
struct Split {
  std::vector<NodeId> labeled;
  std::vector<NodeId> validation;
  std::vector<NodeId> test;
  std::optional<std::vector<NodeId>> observed;

  // Throws InputError on out-of-range ids, overlap, or labeled nodes missing
  // from `observed`.
  void validate(std::size_t num_nodes) const;

  friend bool operator==(const Split&, const Split&) = default;
};

struct Dataset {
  std::string name;
  Graph graph;
  Matrix features;
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
  void validate() const;
  // Restriction to `keep`; local node l is keep[l].
  Dataset induced(std::span<const NodeId> keep) const;
};

// Directory layout: edges.txt, features.txt (or features.bin), labels.txt,
// optional split.json. Every invariant is checked on load and parse errors
// carry file and line.
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const Dataset& data,
                  bool write_binary_features = false);

std::vector<EdgePair> read_edge_list(const std::filesystem::path& path);
Matrix read_feature_text(const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);

// features.bin: magic "IGND", u32 version, u64 N, u64 d, little-endian f64 payload.
void write_features_bin(const std::filesystem::path& path, const Matrix& features);
Matrix read_features_bin(const std::filesystem::path& path);

// split.json: {"labeled": [...], "val": [...], "test": [...], "observed": [...]?}
Split load_split(const std::filesystem::path& path);
void save_split(const std::filesystem::path& path, const Split& split);

// SHA-256 over the canonical little-endian serialization of every field
// except the name.
std::string dataset_hash(const Dataset& data);

}  // namespace infgrand
