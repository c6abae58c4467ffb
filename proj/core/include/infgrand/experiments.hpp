#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "infgrand/config.hpp"
#include "infgrand/dataset.hpp"
#include "infgrand/synthetic.hpp"
#include "infgrand/training.hpp"

namespace infgrand {

std::string_view version();

enum class ExperimentKind { kMain, kQ1, kAblation, kLabelScarce, kSensitivity, kTiming, kCentrality };
std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

// Either a directory in the on-disk layout or a synthetic generator spec.
// With vary_with_seed, the synthetic graph of run seed s uses spec.seed + s.
struct DatasetRef {
  std::optional<std::filesystem::path> path;
  std::optional<SyntheticSpec> synthetic;
  bool vary_with_seed = false;
};

struct TimingOptions {
  std::size_t reps = 50;
  std::size_t warmup = 5;
  std::optional<std::filesystem::path> student_checkpoint;
  std::optional<std::filesystem::path> teacher_checkpoint;
};

struct ExperimentManifest {
  ExperimentKind kind = ExperimentKind::kMain;
  DatasetRef dataset;
  TrainConfig config;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out;
  double q1_fraction = 0.25;
  double min_lift = 0.05;              // main: required infgrand - mlp gap
  std::string knob;                    // sensitivity
  std::vector<nlohmann::json> values;  // sensitivity grid
  std::vector<std::size_t> label_counts{2, 4, 8};
  double max_k_spread = 0.05;          // sensitivity over influence_k
  TimingOptions timing;

  void validate() const;
};

nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(const nlohmann::json& j);
ExperimentManifest load_manifest(const std::filesystem::path& path);

// key=value on the manifest: TrainConfig keys go to the config; seeds, kind,
// data, out, q1_fraction, min_lift, knob, values, label_counts and
// max_k_spread set the manifest fields.
void apply_manifest_override(ExperimentManifest& m, std::string_view assignment);

// Dataset for one run seed.
Dataset resolve_dataset(const DatasetRef& ref, std::uint64_t seed);

// split.json of a dataset directory when present, else generated from cfg.
Split resolve_split(const DatasetRef& ref, const Dataset& data, const TrainConfig& cfg,
                    std::uint64_t seed);

struct ArmSummary {
  std::string name;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single seed
};

ArmSummary summarize(std::string name, nlohmann::json config, std::vector<std::uint64_t> seeds,
                     std::vector<double> accuracies);
nlohmann::json to_json(const ArmSummary& arm);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  ExperimentManifest manifest;
  std::vector<std::string> dataset_hashes;
  std::vector<RunReport> runs;
  std::vector<ArmSummary> arms;
  std::vector<Assertion> assertions;
  std::vector<std::string> sweep_header;
  std::vector<std::vector<std::string>> sweep_rows;
  nlohmann::json extra = nlohmann::json::object();

  bool passed() const;
  const ArmSummary& arm(std::string_view name) const;
  nlohmann::json report() const;
};

ExperimentResult run_main(const ExperimentManifest& m);
ExperimentResult run_q1(const ExperimentManifest& m);
ExperimentResult run_ablation(const ExperimentManifest& m);
ExperimentResult run_label_scarce(const ExperimentManifest& m);
ExperimentResult run_sensitivity(const ExperimentManifest& m);
ExperimentResult run_timing(const ExperimentManifest& m);
ExperimentResult run_centrality_swap(const ExperimentManifest& m);
ExperimentResult run_experiment(const ExperimentManifest& m);

// report.json, epochs.csv and, for sweeps, sweep.csv under `dir`.
void write_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

// CPU model and thread count, best effort.
std::string hardware_descriptor();

}  // namespace infgrand
