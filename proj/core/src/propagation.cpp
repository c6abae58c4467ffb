#include "infgrand/propagation.hpp"

#include <algorithm>
#include <fstream>

#include "binary_io.hpp"
#include "infgrand/error.hpp"
#include "infgrand/hash.hpp"

namespace infgrand {

std::string_view to_string(PoolMode mode) {
  switch (mode) {
    case PoolMode::kMean: return "mean";
    case PoolMode::kMax: return "max";
    case PoolMode::kMin: return "min";
  }
  return "mean";
}

PoolMode parse_pool_mode(std::string_view text) {
  if (text == "mean") return PoolMode::kMean;
  if (text == "max") return PoolMode::kMax;
  if (text == "min") return PoolMode::kMin;
  throw InputError("unknown pool mode '" + std::string(text) + "' (expected mean|max|min)");
}

std::vector<Matrix> multi_hop_features(const NormalizedAdjacency& a, const Matrix& x,
                                       std::size_t hops) {
  if (a.num_nodes != x.rows()) throw InputError("multi_hop_features: row count mismatch");
  std::vector<Matrix> out;
  out.reserve(hops + 1);
  out.push_back(x);
  for (std::size_t p = 1; p <= hops; ++p) out.push_back(spmm(a, out.back()));
  return out;
}

Matrix pool(std::span<const Matrix> mats, PoolMode mode) {
  if (mats.empty()) throw InputError("pool: empty matrix list");
  const std::size_t rows = mats.front().rows();
  const std::size_t cols = mats.front().cols();
  for (const auto& m : mats)
    if (m.rows() != rows || m.cols() != cols) throw InputError("pool: shape mismatch");

  Matrix out = mats.front();
  auto acc = out.values();
  for (std::size_t m = 1; m < mats.size(); ++m) {
    auto v = mats[m].values();
    switch (mode) {
      case PoolMode::kMean:
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
        break;
      case PoolMode::kMax:
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::max(acc[i], v[i]);
        break;
      case PoolMode::kMin:
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::min(acc[i], v[i]);
        break;
    }
  }
  if (mode == PoolMode::kMean && mats.size() > 1) {
    const double count = static_cast<double>(mats.size());
    for (double& v : acc) v /= count;
  }
  return out;
}

const PooledFeatures* PropagationCache::find(const std::string& hash, std::size_t hops,
                                             PoolMode mode) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find({hash, hops, static_cast<int>(mode)});
  return it == entries_.end() ? nullptr : &it->second;
}

const PooledFeatures& PropagationCache::insert(PooledFeatures features) {
  std::lock_guard lock(mutex_);
  Key key{features.graph_hash, features.hops, static_cast<int>(features.pool)};
  auto [it, inserted] = entries_.try_emplace(std::move(key), std::move(features));
  (void)inserted;
  return it->second;
}

PooledFeatures student_input(const Graph& g, const Matrix& x, std::size_t hops, PoolMode mode,
                             PropagationCache* cache) {
  if (x.rows() != g.num_nodes()) throw InputError("student_input: feature rows do not match graph");
  std::string hash = graph_features_hash(g, x);
  if (cache) {
    if (const auto* hit = cache->find(hash, hops, mode)) {
      std::lock_guard lock(cache->mutex_);
      ++cache->hits_;
      return *hit;
    }
  }
  PooledFeatures out;
  out.hops = hops;
  out.pool = mode;
  out.graph_hash = std::move(hash);
  if (hops == 0) {
    out.matrix = x;
  } else {
    const auto adj = normalize_adjacency(g);
    const auto mats = multi_hop_features(adj, x, hops);
    out.matrix = pool(mats, mode);
  }
  if (cache) {
    {
      std::lock_guard lock(cache->mutex_);
      ++cache->misses_;
    }
    return cache->insert(out);
  }
  return out;
}

void save_pooled_features(const std::filesystem::path& path, const PooledFeatures& features) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("IGXT", 4);
  detail::write_u32(out, 1);
  detail::write_u32(out, static_cast<std::uint32_t>(features.hops));
  detail::write_u32(out, static_cast<std::uint32_t>(features.pool));
  detail::write_u32(out, static_cast<std::uint32_t>(features.graph_hash.size()));
  out.write(features.graph_hash.data(), static_cast<std::streamsize>(features.graph_hash.size()));
  detail::write_u64(out, features.matrix.rows());
  detail::write_u64(out, features.matrix.cols());
  detail::write_f64s(out, features.matrix.values());
}

PooledFeatures load_pooled_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string what = path.string();
  if (!in) throw IoError("cannot open " + what);
  detail::expect_magic(in, "IGXT", what);
  if (detail::read_u32(in, what) != 1) throw IoError(what + ": unsupported version");
  PooledFeatures f;
  f.hops = detail::read_u32(in, what);
  const auto mode = detail::read_u32(in, what);
  if (mode > 2) throw IoError(what + ": bad pool mode");
  f.pool = static_cast<PoolMode>(mode);
  const auto hash_len = detail::read_u32(in, what);
  f.graph_hash.resize(hash_len);
  if (!in.read(f.graph_hash.data(), hash_len)) throw IoError(what + ": truncated hash");
  const auto rows = detail::read_u64(in, what);
  const auto cols = detail::read_u64(in, what);
  f.matrix = Matrix(rows, cols, detail::read_f64s(in, rows * cols, what));
  return f;
}

}  // namespace infgrand
