#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "infgrand/centrality.hpp"
#include "infgrand/config.hpp"
#include "infgrand/dataset.hpp"
#include "infgrand/influence.hpp"
#include "infgrand/params.hpp"
#include "infgrand/propagation.hpp"
#include "infgrand/splits.hpp"

namespace infgrand {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

// Wall-clock milliseconds.
struct Timings {
  double teacher_train = 0.0;
  double influence = 0.0;
  double propagation = 0.0;
  double student_train = 0.0;
  double student_inference = 0.0;
  double teacher_inference = 0.0;
};

struct RunReport {
  std::string model;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  double test_acc = 0.0;
  Timings timings;
  TrainConfig config;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const RunReport& report);
// Header: model,epoch,train_loss,val_loss,train_acc,val_acc
void write_epochs_csv_header(std::ostream& out);
void write_epochs_csv(std::ostream& out, const RunReport& report);

template <class P>
struct Trained {
  P params;
  RunReport report;
};

// Independent stream seeds from one run seed (splitmix64 of seed + stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Fraction of `nodes` whose argmax logit (lowest index on ties) equals the label.
double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes);
double evaluate(const MlpParams& p, const Matrix& x, std::span<const int> labels,
                std::span<const NodeId> nodes);
double evaluate(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                std::span<const int> labels, std::span<const NodeId> nodes);

// Full-batch GCN training by mean cross-entropy on split.labeled with early
// stopping on validation accuracy. Returns the best-validation parameters;
// test accuracy is measured on split.test when it is nonempty.
Trained<GcnParams> train_teacher(const Dataset& data, const Split& split, const TrainConfig& cfg);

// Raw teacher logits for every node of the given graph, dropout disabled.
Matrix teacher_logits(const GcnParams& p, const Graph& g, const Matrix& features);

// MLP on `student_features` minimizing
// lambda * L_s + (1 - lambda) * L_d with per-node weights `node_weights`.
Trained<MlpParams> train_student(const Dataset& data, const Split& split,
                                 const Matrix& teacher_logits, std::span<const double> node_weights,
                                 const Matrix& student_features, const TrainConfig& cfg);
Trained<MlpParams> train_student(const Dataset& data, const Split& split,
                                 const Matrix& teacher_logits, const InfluenceTable& influence,
                                 const PooledFeatures& xtilde, const TrainConfig& cfg);
Trained<MlpParams> train_student(const Dataset& data, const Split& split,
                                 const Matrix& teacher_logits, const CentralityVector& centrality,
                                 const PooledFeatures& xtilde, const TrainConfig& cfg);

// MLP trained on the weighted supervised loss only, with no teacher. Same
// seed streams as train_student, so it retraces the lambda = 1 run exactly.
Trained<MlpParams> train_supervised_mlp(const Dataset& data, const Split& split,
                                        std::span<const double> node_weights,
                                        const Matrix& student_features, const TrainConfig& cfg);

enum class WeightSource { kInfluence, kDegree, kPageRank, kNone };
std::string_view to_string(WeightSource source);

struct StudentArm {
  std::string name = "infgrand";
  WeightSource weights = WeightSource::kInfluence;
  bool propagate = true;  // false: raw features (P = 0)
};

// One seed of the full procedure on one split: teacher, frozen logits, node
// weights and pooled features on the training graph, student, and test
// accuracy on the evaluation graph. The teacher and derived artifacts are
// computed once and shared by every student arm.
class Pipeline {
 public:
  Pipeline(const Dataset& data, const Split& split, TrainConfig cfg,
           PropagationCache* cache = nullptr);

  const SplitView& view() const noexcept { return view_; }
  const TrainConfig& config() const noexcept { return cfg_; }

  const Trained<GcnParams>& teacher();
  const Matrix& teacher_train_logits();

  // Node weights on the training graph; influence uses cfg.influence_k/mode.
  Vector node_weights(WeightSource source, const TrainConfig& cfg);

  // Student under `cfg` (student-side fields only; the teacher always uses
  // the constructor config).
  Trained<MlpParams> student(const StudentArm& arm, const TrainConfig& cfg);
  Trained<MlpParams> student(const StudentArm& arm) { return student(arm, cfg_); }

 private:
  struct Features {
    Matrix train;
    Matrix eval;
    double millis = 0.0;
  };
  const Features& features(std::size_t hops, PoolMode pool);
  const std::pair<Vector, double>& weight_entry(WeightSource source, const TrainConfig& cfg);

  SplitView view_;
  TrainConfig cfg_;
  PropagationCache* cache_;
  std::optional<Trained<GcnParams>> teacher_;
  Matrix teacher_logits_;
  std::map<std::tuple<int, std::size_t, int>, std::pair<Vector, double>> weights_;
  std::map<std::pair<std::size_t, int>, Features> features_;
};

}  // namespace infgrand
