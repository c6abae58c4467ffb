#include "infgrand/checkpoint.hpp"

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "infgrand/error.hpp"

namespace infgrand {

namespace {

using Shape = std::vector<std::size_t>;

void write(const std::filesystem::path& path, const std::string& model,
           const std::vector<Shape>& shapes, const std::vector<std::span<const double>>& blocks,
           const CheckpointInfo& info) {
  nlohmann::json header = {{"format", "infgrand-checkpoint"}, {"version", 1}, {"model", model},
                           {"shapes", shapes}, {"seed", info.seed}, {"step", info.step}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << header.dump() << '\n';
  for (auto b : blocks) detail::write_f64s(out, b);
}

struct Raw {
  std::vector<Shape> shapes;
  std::vector<std::vector<double>> blocks;
};

Raw read(const std::filesystem::path& path, const std::string& model, CheckpointInfo* info) {
  const std::string what = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + what);
  std::string line;
  if (!std::getline(in, line)) throw IoError(what + ": missing header");
  Raw raw;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format") != "infgrand-checkpoint") throw IoError(what + ": not a checkpoint");
    if (header.at("model") != model)
      throw IoError(what + ": holds a " + header.at("model").get<std::string>() + " model, expected " + model);
    raw.shapes = header.at("shapes").get<std::vector<Shape>>();
    if (info) {
      info->seed = header.at("seed").get<std::uint64_t>();
      info->step = header.at("step").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(what + ": malformed header: " + e.what());
  }
  for (const auto& s : raw.shapes) {
    std::size_t count = 1;
    for (std::size_t d : s) count *= d;
    raw.blocks.push_back(detail::read_f64s(in, count, what));
  }
  return raw;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params,
                     const CheckpointInfo& info) {
  params.validate();
  write(path, "mlp",
        {{params.w1.rows(), params.w1.cols()}, {params.b1.size()}, {params.w2.rows(), params.w2.cols()},
         {params.b2.size()}},
        params.blocks(), info);
}

void save_checkpoint(const std::filesystem::path& path, const GcnParams& params,
                     const CheckpointInfo& info) {
  params.validate();
  std::vector<Shape> shapes;
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    shapes.push_back({params.weights[l].rows(), params.weights[l].cols()});
    shapes.push_back({params.biases[l].size()});
  }
  write(path, "gcn", shapes, params.blocks(), info);
}

MlpParams load_mlp_checkpoint(const std::filesystem::path& path, CheckpointInfo* info) {
  auto raw = read(path, "mlp", info);
  if (raw.shapes.size() != 4 || raw.shapes[0].size() != 2 || raw.shapes[2].size() != 2)
    throw IoError(path.string() + ": unexpected MLP block layout");
  MlpParams p;
  p.w1 = Matrix(raw.shapes[0][0], raw.shapes[0][1], std::move(raw.blocks[0]));
  p.b1 = std::move(raw.blocks[1]);
  p.w2 = Matrix(raw.shapes[2][0], raw.shapes[2][1], std::move(raw.blocks[2]));
  p.b2 = std::move(raw.blocks[3]);
  p.validate();
  return p;
}

GcnParams load_gcn_checkpoint(const std::filesystem::path& path, CheckpointInfo* info) {
  auto raw = read(path, "gcn", info);
  if (raw.shapes.empty() || raw.shapes.size() % 2 != 0)
    throw IoError(path.string() + ": unexpected GCN block layout");
  GcnParams p;
  for (std::size_t b = 0; b < raw.shapes.size(); b += 2) {
    if (raw.shapes[b].size() != 2) throw IoError(path.string() + ": weight block is not 2-D");
    p.weights.emplace_back(raw.shapes[b][0], raw.shapes[b][1], std::move(raw.blocks[b]));
    p.biases.push_back(std::move(raw.blocks[b + 1]));
  }
  p.validate();
  return p;
}

}  // namespace infgrand
