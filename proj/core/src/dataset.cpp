#include "infgrand/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "infgrand/error.hpp"
#include "infgrand/hash.hpp"

namespace infgrand {

namespace fs = std::filesystem;

void Split::validate(std::size_t num_nodes) const {
  std::vector<int> owner(num_nodes, -1);
  const std::vector<NodeId>* sets[] = {&labeled, &validation, &test};
  static constexpr const char* kNames[] = {"labeled", "validation", "test"};
  for (int s = 0; s < 3; ++s) {
    for (NodeId v : *sets[s]) {
      if (v >= num_nodes)
        throw InputError(std::string(kNames[s]) + " node " + std::to_string(v) + " out of range");
      if (owner[v] != -1 && owner[v] != s)
        throw InputError("node " + std::to_string(v) + " is in both the " + kNames[owner[v]] +
                         " and " + kNames[s] + " sets");
      owner[v] = s;
    }
  }
  if (observed) {
    std::vector<char> in_observed(num_nodes, 0);
    for (NodeId v : *observed) {
      if (v >= num_nodes) throw InputError("observed node " + std::to_string(v) + " out of range");
      in_observed[v] = 1;
    }
    for (NodeId v : labeled)
      if (!in_observed[v])
        throw InputError("labeled node " + std::to_string(v) + " is not observed");
  }
}

void Dataset::validate() const {
  const std::size_t n = graph.num_nodes();
  if (features.rows() != n)
    throw InputError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                     std::to_string(n) + " nodes");
  if (labels.size() != n)
    throw InputError("label vector has " + std::to_string(labels.size()) + " entries for " +
                     std::to_string(n) + " nodes");
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes)
      throw InputError("label of node " + std::to_string(i) + " outside [0, " +
                       std::to_string(num_classes) + ")");
  if (!all_finite(features)) throw InputError("feature matrix contains non-finite values");
}

Dataset Dataset::induced(std::span<const NodeId> keep) const {
  Dataset sub;
  sub.name = name;
  sub.num_classes = num_classes;
  sub.graph = induced_subgraph(graph, keep).graph;
  sub.features = Matrix(keep.size(), features.cols());
  sub.labels.resize(keep.size());
  for (std::size_t l = 0; l < keep.size(); ++l) {
    auto src = features.row(keep[l]);
    std::copy(src.begin(), src.end(), sub.features.row(l).begin());
    sub.labels[l] = labels[keep[l]];
  }
  return sub;
}

namespace {

std::string where(const fs::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

template <class T>
bool parse_token(std::string_view token, T& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    const auto end = line.find_first_of(" \t\r", pos);
    tokens.push_back(line.substr(pos, end == std::string_view::npos ? line.size() - pos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end;
  }
  return tokens;
}

std::ifstream open_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing or unreadable file " + path.string());
  return in;
}

}  // namespace

std::vector<EdgePair> read_edge_list(const fs::path& path) {
  auto in = open_text(path);
  std::vector<EdgePair> edges;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (skippable(line)) continue;
    const auto tokens = split_ws(line);
    EdgePair e;
    if (tokens.size() != 2 || !parse_token(tokens[0], e.u) || !parse_token(tokens[1], e.v))
      throw IoError(where(path, no) + ": expected two integer node ids");
    edges.push_back(e);
  }
  return edges;
}

Matrix read_feature_text(const fs::path& path) {
  auto in = open_text(path);
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (skippable(line)) continue;
    const auto tokens = split_ws(line);
    if (rows == 0) cols = tokens.size();
    if (tokens.size() != cols)
      throw IoError(where(path, no) + ": expected " + std::to_string(cols) + " values, found " +
                    std::to_string(tokens.size()));
    for (auto t : tokens) {
      double v = 0.0;
      if (!parse_token(t, v)) throw IoError(where(path, no) + ": '" + std::string(t) + "' is not a number");
      if (!std::isfinite(v)) throw IoError(where(path, no) + ": non-finite feature value");
      data.push_back(v);
    }
    ++rows;
  }
  return Matrix(rows, cols, std::move(data));
}

std::vector<int> read_labels(const fs::path& path) {
  auto in = open_text(path);
  std::vector<int> labels;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (skippable(line)) continue;
    const auto tokens = split_ws(line);
    int v = 0;
    if (tokens.size() != 1 || !parse_token(tokens[0], v))
      throw IoError(where(path, no) + ": expected one integer class label");
    if (v < 0) throw IoError(where(path, no) + ": negative class label");
    labels.push_back(v);
  }
  return labels;
}

void write_features_bin(const fs::path& path, const Matrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("IGND", 4);
  detail::write_u32(out, 1);
  detail::write_u64(out, features.rows());
  detail::write_u64(out, features.cols());
  detail::write_f64s(out, features.values());
}

Matrix read_features_bin(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string what = path.string();
  if (!in) throw IoError("cannot open " + what);
  detail::expect_magic(in, "IGND", what);
  if (detail::read_u32(in, what) != 1) throw IoError(what + ": unsupported version");
  const auto rows = detail::read_u64(in, what);
  const auto cols = detail::read_u64(in, what);
  Matrix m(rows, cols, detail::read_f64s(in, rows * cols, what));
  if (!all_finite(m)) throw IoError(what + ": non-finite feature value");
  return m;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("dataset directory " + dir.string() + " does not exist");
  Dataset d;
  d.name = fs::absolute(dir).lexically_normal().filename().string();
  if (d.name.empty()) d.name = fs::absolute(dir).parent_path().filename().string();
  d.labels = read_labels(dir / "labels.txt");
  const std::size_t n = d.labels.size();
  d.features = fs::exists(dir / "features.bin") ? read_features_bin(dir / "features.bin")
                                                 : read_feature_text(dir / "features.txt");
  if (d.features.rows() != n)
    throw IoError((dir / "features.txt").string() + ": has " + std::to_string(d.features.rows()) +
                  " rows but labels.txt has " + std::to_string(n));
  const auto edges = read_edge_list(dir / "edges.txt");
  try {
    d.graph = build_graph(edges, n);
  } catch (const InputError& e) {
    throw IoError((dir / "edges.txt").string() + ": " + e.what());
  }
  d.num_classes = n == 0 ? 0 : static_cast<std::size_t>(*std::max_element(d.labels.begin(), d.labels.end())) + 1;
  d.validate();
  return d;
}

void save_dataset(const fs::path& dir, const Dataset& data, bool write_binary_features) {
  data.validate();
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "edges.txt");
    if (!out) throw IoError("cannot write " + (dir / "edges.txt").string());
    out << "# " << data.num_nodes() << " nodes, " << data.graph.num_edges() << " undirected edges\n";
    for (const auto& e : data.graph.undirected_edges()) out << e.u << ' ' << e.v << '\n';
  }
  {
    std::ofstream out(dir / "features.txt");
    if (!out) throw IoError("cannot write " + (dir / "features.txt").string());
    char buf[32];
    for (std::size_t r = 0; r < data.features.rows(); ++r) {
      auto row = data.features.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
        out << (c ? " " : "") << buf;
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.txt");
    if (!out) throw IoError("cannot write " + (dir / "labels.txt").string());
    for (int l : data.labels) out << l << '\n';
  }
  if (write_binary_features) write_features_bin(dir / "features.bin", data.features);
}

Split load_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file " + path.string());
  Split s;
  try {
    nlohmann::json j;
    in >> j;
    j.at("labeled").get_to(s.labeled);
    j.at("val").get_to(s.validation);
    j.at("test").get_to(s.test);
    if (j.contains("observed")) j.at("observed").get_to(s.observed.emplace());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": malformed split: " + e.what());
  }
  return s;
}

void save_split(const fs::path& path, const Split& split) {
  nlohmann::json j = {{"labeled", split.labeled}, {"val", split.validation}, {"test", split.test}};
  if (split.observed) j["observed"] = *split.observed;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << '\n';
}

std::string dataset_hash(const Dataset& data) {
  ContentHasher h;
  hash_into(h, data.graph);
  hash_into(h, data.features);
  h.u64(data.num_classes).u64(data.labels.size());
  for (int l : data.labels) h.u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(l)));
  return h.hex_digest();
}

}  // namespace infgrand
