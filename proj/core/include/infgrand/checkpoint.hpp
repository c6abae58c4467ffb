#pragma once

#include <cstdint>
#include <filesystem>

#include "infgrand/params.hpp"

namespace infgrand {

struct CheckpointInfo {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

// One JSON header line (model kind, block shapes, seed, step) followed by the
// little-endian f64 payload of every block in order. Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const MlpParams& params,
                     const CheckpointInfo& info = {});
void save_checkpoint(const std::filesystem::path& path, const GcnParams& params,
                     const CheckpointInfo& info = {});

MlpParams load_mlp_checkpoint(const std::filesystem::path& path, CheckpointInfo* info = nullptr);
GcnParams load_gcn_checkpoint(const std::filesystem::path& path, CheckpointInfo* info = nullptr);

}  // namespace infgrand
