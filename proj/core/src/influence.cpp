#include "infgrand/influence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "infgrand/error.hpp"
#include "infgrand/hash.hpp"
#include "infgrand/parallel.hpp"

namespace infgrand {

std::string_view to_string(InfluenceMode mode) {
  return mode == InfluenceMode::kDense ? "dense" : "khop";
}

InfluenceMode parse_influence_mode(std::string_view text) {
  if (text == "dense") return InfluenceMode::kDense;
  if (text == "khop" || text == "k-hop") return InfluenceMode::kKHop;
  throw InputError("unknown influence mode '" + std::string(text) + "' (expected dense|khop)");
}

PairwiseTable PairwiseTable::dense(std::size_t num_nodes) {
  PairwiseTable t;
  t.mode_ = InfluenceMode::kDense;
  t.num_nodes_ = num_nodes;
  t.all_nodes_.resize(num_nodes);
  std::iota(t.all_nodes_.begin(), t.all_nodes_.end(), NodeId{0});
  t.values_.assign(num_nodes * num_nodes, 0.0);
  return t;
}

PairwiseTable PairwiseTable::sparse(SparsePattern support) {
  PairwiseTable t;
  t.mode_ = InfluenceMode::kKHop;
  t.num_nodes_ = support.num_nodes;
  t.values_.assign(support.num_pairs(), 0.0);
  t.support_ = std::move(support);
  return t;
}

std::span<const NodeId> PairwiseTable::sources(NodeId target) const noexcept {
  if (mode_ == InfluenceMode::kDense) return all_nodes_;
  return support_.row(target);
}

std::span<double> PairwiseTable::row(NodeId target) noexcept {
  if (mode_ == InfluenceMode::kDense) return {values_.data() + target * num_nodes_, num_nodes_};
  return {values_.data() + support_.row_ptr[target],
          support_.row_ptr[target + 1] - support_.row_ptr[target]};
}

std::span<const double> PairwiseTable::row(NodeId target) const noexcept {
  return const_cast<PairwiseTable*>(this)->row(target);
}

double PairwiseTable::at(NodeId target, NodeId source) const noexcept {
  if (mode_ == InfluenceMode::kDense) return values_[target * num_nodes_ + source];
  auto src = support_.row(target);
  auto it = std::lower_bound(src.begin(), src.end(), source);
  if (it == src.end() || *it != source) return 0.0;
  return row(target)[static_cast<std::size_t>(it - src.begin())];
}

Matrix propagate_k(const NormalizedAdjacency& a, const Matrix& x, std::size_t k) {
  if (a.num_nodes != x.rows()) throw InputError("propagate_k: adjacency/feature row mismatch");
  Matrix current = x;
  for (std::size_t step = 0; step < k; ++step) current = spmm(a, current);
  return current;
}

namespace {

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double cosine_from_parts(std::span<const double> a, double a2, std::span<const double> b,
                         double b2) {
  if (a2 == 0.0 || b2 == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
  return dot / std::sqrt(a2 * b2);
}

void fill_raw(const Matrix& x0, const Matrix& xk, PairwiseTable& table, std::size_t block_size) {
  if (x0.rows() != xk.rows() || x0.cols() != xk.cols())
    throw InputError("raw_influence: x0 and xk must share a shape");
  const std::size_t n = x0.rows();
  Vector src_norm(n), dst_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    src_norm[i] = squared_norm(x0.row(i));
    dst_norm[i] = squared_norm(xk.row(i));
  }
  const std::size_t block = std::max<std::size_t>(block_size, 1);
  const std::size_t num_blocks = (n + block - 1) / block;
  parallel_for(num_blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t end = std::min(n, (b + 1) * block);
      for (std::size_t j = b * block; j < end; ++j) {
        const auto target = static_cast<NodeId>(j);
        auto srcs = table.sources(target);
        auto out = table.row(target);
        auto xj = xk.row(j);
        for (std::size_t e = 0; e < srcs.size(); ++e)
          out[e] = cosine_from_parts(x0.row(srcs[e]), src_norm[srcs[e]], xj, dst_norm[j]);
      }
    }
  }, 1);
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("cosine_similarity: length mismatch");
  return cosine_from_parts(a, squared_norm(a), b, squared_norm(b));
}

PairwiseTable raw_influence(const Matrix& x0, const Matrix& xk, std::size_t block_size) {
  auto table = PairwiseTable::dense(x0.rows());
  fill_raw(x0, xk, table, block_size);
  return table;
}

PairwiseTable raw_influence(const Matrix& x0, const Matrix& xk, SparsePattern support,
                            std::size_t block_size) {
  if (support.num_nodes != x0.rows()) throw InputError("raw_influence: support size mismatch");
  auto table = PairwiseTable::sparse(std::move(support));
  fill_raw(x0, xk, table, block_size);
  return table;
}

PairwiseTable scale_minmax(PairwiseTable raw) {
  auto v = raw.values();
  if (v.empty()) throw InputError("scale_minmax: empty support");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) {
    std::fill(v.begin(), v.end(), 0.5);
    return raw;
  }
  const double range = hi - lo;
  for (double& s : v) s = (s - lo) / range;
  return raw;
}

PairwiseTable normalize_per_target(PairwiseTable scaled) {
  for (NodeId j = 0; j < scaled.num_nodes(); ++j) {
    auto r = scaled.row(j);
    double total = 0.0;
    for (double s : r) total += s;
    if (total == 0.0) continue;
    for (double& s : r) s /= total;
  }
  return scaled;
}

Vector global_influence(const PairwiseTable& normalized) {
  const std::size_t n = normalized.num_nodes();
  Vector totals(n, 0.0);
  for (NodeId j = 0; j < n; ++j) {
    auto srcs = normalized.sources(j);
    auto r = normalized.row(j);
    for (std::size_t e = 0; e < srcs.size(); ++e) totals[srcs[e]] += r[e];
  }
  const double peak = totals.empty() ? 0.0 : *std::max_element(totals.begin(), totals.end());
  if (peak == 0.0) return Vector(n, 0.0);
  for (double& t : totals) t /= peak;
  return totals;
}

InfluenceTable compute_influence(const Graph& g, const Matrix& features,
                                 const InfluenceOptions& options) {
  if (options.k < 1) throw InputError("compute_influence: k must be at least 1");
  if (features.rows() != g.num_nodes())
    throw InputError("compute_influence: feature rows do not match node count");
  if (options.mode == InfluenceMode::kDense && g.num_nodes() > options.dense_cap) {
    throw CapacityError("dense influence over " + std::to_string(g.num_nodes()) +
                        " nodes exceeds the cap of " + std::to_string(options.dense_cap) +
                        "; use k-hop mode");
  }

  const std::string hash = graph_features_hash(g, features);
  if (!options.cache_path.empty() && std::filesystem::exists(options.cache_path)) {
    try {
      auto cached = load_influence_cache(options.cache_path);
      if (cached.content_hash == hash && cached.mode == options.mode && cached.k == options.k)
        return cached;
    } catch (const IoError&) {
      // Unreadable cache: fall through and overwrite it.
    }
  }

  const auto adj = normalize_adjacency(g);
  const Matrix xk = propagate_k(adj, features, options.k);
  PairwiseTable raw = options.mode == InfluenceMode::kDense
                          ? raw_influence(features, xk, options.block_size)
                          : raw_influence(features, xk, k_hop_mask(g, options.k), options.block_size);

  InfluenceTable table;
  table.mode = options.mode;
  table.k = options.k;
  table.content_hash = hash;
  table.pairwise = normalize_per_target(scale_minmax(std::move(raw)));
  table.gis = global_influence(*table.pairwise);

  if (!options.cache_path.empty()) save_influence_cache(options.cache_path, table);
  return table;
}

void save_influence_cache(const std::filesystem::path& path, const InfluenceTable& table) {
  nlohmann::json j;
  j["format"] = "infgrand-influence";
  j["version"] = 1;
  j["mode"] = std::string(to_string(table.mode));
  j["k"] = table.k;
  j["hash"] = table.content_hash;
  j["gis"] = table.gis;
  if (table.mode == InfluenceMode::kKHop && table.pairwise) {
    const auto& support = table.pairwise->support();
    j["pairwise"] = {{"row_ptr", support.row_ptr},
                     {"col_idx", support.col_idx},
                     {"values", std::vector<double>(table.pairwise->values().begin(),
                                                    table.pairwise->values().end())}};
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write influence cache " + path.string());
  out << j.dump() << '\n';
}

InfluenceTable load_influence_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open influence cache " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "infgrand-influence") throw IoError("not an influence cache");
    InfluenceTable t;
    t.mode = parse_influence_mode(j.at("mode").get<std::string>());
    t.k = j.at("k").get<std::size_t>();
    t.content_hash = j.at("hash").get<std::string>();
    t.gis = j.at("gis").get<Vector>();
    t.from_cache = true;
    if (j.contains("pairwise")) {
      SparsePattern support;
      support.row_ptr = j["pairwise"].at("row_ptr").get<std::vector<std::size_t>>();
      support.col_idx = j["pairwise"].at("col_idx").get<std::vector<NodeId>>();
      support.num_nodes = support.row_ptr.size() - 1;
      auto values = j["pairwise"].at("values").get<std::vector<double>>();
      if (values.size() != support.num_pairs()) throw IoError("pairwise payload size mismatch");
      auto table = PairwiseTable::sparse(std::move(support));
      std::copy(values.begin(), values.end(), table.values().begin());
      t.pairwise = std::move(table);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": malformed influence cache: " + e.what());
  } catch (const InputError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace infgrand
