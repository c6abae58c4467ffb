#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "infgrand/influence.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/propagation.hpp"

namespace infgrand {

enum class Setting { kTransductive, kInductive };

std::string_view to_string(Setting setting);
Setting parse_setting(std::string_view text);

struct TrainConfig {
  LossWeights loss;
  std::size_t hops = 2;
  PoolMode pool = PoolMode::kMean;
  std::size_t influence_k = 2;
  InfluenceMode influence_mode = InfluenceMode::kDense;
  std::size_t teacher_hidden = 64;
  std::size_t student_hidden = 64;
  std::size_t teacher_layers = 2;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  std::size_t max_epochs = 500;
  std::size_t patience = 50;
  std::uint64_t seed = 0;
  Setting setting = Setting::kTransductive;

  // Split generation, used when the dataset carries no split.json.
  std::size_t labels_per_class = 20;
  std::size_t val_size = 500;
  std::size_t test_size = 1000;
  double observed_fraction = 0.5;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Flat JSON object, one key per field; loss weights appear as lambda, delta1,
// delta2, gamma1, gamma2, tau. Unknown keys are rejected.
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path);

// Applies "key=value". The value is read as JSON when it parses, otherwise as
// a string, so `pool=max` and `lambda=0.3` both work.
void apply_override(TrainConfig& cfg, std::string_view assignment);

}  // namespace infgrand
