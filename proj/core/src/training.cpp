#include "infgrand/training.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "infgrand/error.hpp"
#include "infgrand/gcn.hpp"
#include "infgrand/losses.hpp"
#include "infgrand/mlp.hpp"
#include "infgrand/optimizer.hpp"

namespace infgrand {

namespace {

enum SeedStream : std::uint64_t {
  kTeacherInit = 1,
  kTeacherDropout = 2,
  kStudentInit = 3,
  kStudentDropout = 4,
};

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_nonempty(const Split& split) {
  if (split.labeled.empty()) throw InputError("labeled split is empty");
  if (split.validation.empty()) throw InputError("validation split is empty");
}

void check_nodes(std::span<const NodeId> nodes, std::size_t n, const char* what) {
  for (NodeId v : nodes)
    if (v >= n) throw InputError(std::string(what) + " node " + std::to_string(v) + " out of range");
}

struct StepResult {
  double loss = 0.0;
  Matrix logit_gradient;
};

// Shared MLP loop; `objective` maps training-mode logits to loss and gradient.
Trained<MlpParams> fit_mlp(const Dataset& data, const Split& split, const Matrix& x,
                           const TrainConfig& cfg, const char* model,
                           const std::function<StepResult(const Matrix&)>& objective) {
  cfg.validate();
  require_nonempty(split);
  if (x.rows() != data.num_nodes()) throw InputError("student features do not cover every node");
  check_nodes(split.labeled, data.num_nodes(), "labeled");
  check_nodes(split.validation, data.num_nodes(), "validation");
  check_nodes(split.test, data.num_nodes(), "test");

  const auto start = Clock::now();
  Trained<MlpParams> out;
  MlpParams params = init_mlp(x.cols(), cfg.student_hidden, data.num_classes,
                              derive_seed(cfg.seed, kStudentInit));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, kStudentDropout));
  auto opt = make_optimizer(params, AdamOptions{cfg.learning_rate, cfg.weight_decay});
  out.params = params;
  RunReport& r = out.report;
  r.model = model;
  r.config = cfg;
  r.seed = cfg.seed;
  bool have_best = false;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const MlpActivations acts = mlp_forward_train(params, x, cfg.dropout, dropout_rng);
    const StepResult step = objective(acts.logits);
    const auto grad = mlp_backward(params, x, acts, step.logit_gradient);
    optimizer_step(opt, params, grad);
    if (!all_finite(params)) throw Error("student parameters diverged at epoch " + std::to_string(epoch));

    const Matrix logits = mlp_forward(params, x).logits;
    EpochRecord rec{epoch, step.loss, mean_cross_entropy(logits, data.labels, split.validation),
                    accuracy(logits, data.labels, split.labeled),
                    accuracy(logits, data.labels, split.validation)};
    r.epochs.push_back(rec);
    if (!have_best || rec.val_acc > r.best_val_acc) {
      have_best = true;
      r.best_val_acc = rec.val_acc;
      r.best_epoch = epoch;
      out.params = params;
    } else if (epoch - r.best_epoch >= cfg.patience) {
      break;
    }
  }
  r.timings.student_train = millis_since(start);
  if (!split.test.empty()) {
    const auto t0 = Clock::now();
    const Matrix logits = mlp_forward(out.params, x).logits;
    r.timings.student_inference = millis_since(t0);
    r.test_acc = accuracy(logits, data.labels, split.test);
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"train_acc", e.train_acc},
                      {"val_acc", e.val_acc}});
  return {{"model", r.model},
          {"seed", r.seed},
          {"best_epoch", r.best_epoch},
          {"best_val_acc", r.best_val_acc},
          {"test_acc", r.test_acc},
          {"timings_ms",
           {{"teacher_train", r.timings.teacher_train},
            {"influence", r.timings.influence},
            {"propagation", r.timings.propagation},
            {"student_train", r.timings.student_train},
            {"student_inference", r.timings.student_inference},
            {"teacher_inference", r.timings.teacher_inference}}},
          {"config", to_json(r.config)},
          {"epochs", epochs}};
}

void write_epochs_csv_header(std::ostream& out) {
  out << "model,seed,epoch,train_loss,val_loss,train_acc,val_acc\n";
}

void write_epochs_csv(std::ostream& out, const RunReport& r) {
  char buf[160];
  for (const auto& e : r.epochs) {
    std::snprintf(buf, sizeof buf, ",%llu,%zu,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.seed), e.epoch, e.train_loss, e.val_loss,
                  e.train_acc, e.val_acc);
    out << r.model << buf;
  }
}

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InputError("accuracy over an empty node set");
  if (labels.size() != logits.rows()) throw InputError("labels and logits disagree on node count");
  std::size_t correct = 0;
  for (NodeId v : nodes) {
    if (v >= logits.rows()) throw InputError("node " + std::to_string(v) + " out of range");
    correct += static_cast<int>(argmax(logits.row(v))) == labels[v];
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

double evaluate(const MlpParams& p, const Matrix& x, std::span<const int> labels,
                std::span<const NodeId> nodes) {
  return accuracy(mlp_forward(p, x).logits, labels, nodes);
}

double evaluate(const GcnParams& p, const NormalizedAdjacency& a, const Matrix& x,
                std::span<const int> labels, std::span<const NodeId> nodes) {
  return accuracy(gcn_forward(p, a, x), labels, nodes);
}

Trained<GcnParams> train_teacher(const Dataset& data, const Split& split, const TrainConfig& cfg) {
  cfg.validate();
  require_nonempty(split);
  check_nodes(split.labeled, data.num_nodes(), "labeled");
  check_nodes(split.validation, data.num_nodes(), "validation");
  check_nodes(split.test, data.num_nodes(), "test");

  const auto start = Clock::now();
  const NormalizedAdjacency a = normalize_adjacency(data.graph);
  GcnParams params = init_gcn(data.features.cols(), cfg.teacher_hidden, data.num_classes,
                              derive_seed(cfg.seed, kTeacherInit), cfg.teacher_layers);
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, kTeacherDropout));
  auto opt = make_optimizer(params, AdamOptions{cfg.learning_rate, cfg.weight_decay});

  Trained<GcnParams> out;
  out.params = params;
  RunReport& r = out.report;
  r.model = "teacher";
  r.config = cfg;
  r.seed = cfg.seed;
  bool have_best = false;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const GcnActivations acts = gcn_forward_train(params, a, data.features, cfg.dropout, &dropout_rng);
    const double loss = mean_cross_entropy(acts.logits, data.labels, split.labeled);
    const Matrix dlogits = mean_ce_logit_gradient(acts.logits, data.labels, split.labeled);
    const auto grad = gcn_backward_from(params, a, acts, dlogits);
    optimizer_step(opt, params, grad);
    if (!all_finite(params)) throw Error("teacher parameters diverged at epoch " + std::to_string(epoch));

    const Matrix logits = gcn_forward(params, a, data.features);
    EpochRecord rec{epoch, loss, mean_cross_entropy(logits, data.labels, split.validation),
                    accuracy(logits, data.labels, split.labeled),
                    accuracy(logits, data.labels, split.validation)};
    r.epochs.push_back(rec);
    if (!have_best || rec.val_acc > r.best_val_acc) {
      have_best = true;
      r.best_val_acc = rec.val_acc;
      r.best_epoch = epoch;
      out.params = params;
    } else if (epoch - r.best_epoch >= cfg.patience) {
      break;
    }
  }
  r.timings.teacher_train = millis_since(start);
  if (!split.test.empty()) {
    const auto t0 = Clock::now();
    const Matrix logits = gcn_forward(out.params, a, data.features);
    r.timings.teacher_inference = millis_since(t0);
    r.test_acc = accuracy(logits, data.labels, split.test);
  }
  return out;
}

Matrix teacher_logits(const GcnParams& p, const Graph& g, const Matrix& features) {
  if (features.rows() != g.num_nodes())
    throw InputError("teacher_logits: features have " + std::to_string(features.rows()) +
                     " rows for " + std::to_string(g.num_nodes()) + " nodes");
  return gcn_forward(p, normalize_adjacency(g), features);
}

Trained<MlpParams> train_student(const Dataset& data, const Split& split,
                                 const Matrix& teacher, std::span<const double> node_weights,
                                 const Matrix& student_features, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.num_nodes();
  if (node_weights.size() != n) throw InputError("node weights do not cover every node");
  if (cfg.loss.lambda != 1.0 && (teacher.rows() != n || teacher.cols() != data.num_classes))
    throw InputError("teacher logits must be " + std::to_string(n) + " x " +
                     std::to_string(data.num_classes));
  return fit_mlp(data, split, student_features, cfg, "student", [&](const Matrix& logits) {
    auto obj = total_objective(logits, teacher, data.graph, data.labels, split.labeled,
                               node_weights, cfg.loss);
    return StepResult{obj.total, std::move(obj.logit_gradient)};
  });
}

Trained<MlpParams> train_student(const Dataset& data, const Split& split, const Matrix& teacher,
                                 const InfluenceTable& influence, const PooledFeatures& xtilde,
                                 const TrainConfig& cfg) {
  return train_student(data, split, teacher, influence.weights(), xtilde.matrix, cfg);
}

Trained<MlpParams> train_student(const Dataset& data, const Split& split, const Matrix& teacher,
                                 const CentralityVector& centrality, const PooledFeatures& xtilde,
                                 const TrainConfig& cfg) {
  return train_student(data, split, teacher, centrality.weights(), xtilde.matrix, cfg);
}

Trained<MlpParams> train_supervised_mlp(const Dataset& data, const Split& split,
                                        std::span<const double> node_weights,
                                        const Matrix& student_features, const TrainConfig& cfg) {
  if (node_weights.size() != data.num_nodes()) throw InputError("node weights do not cover every node");
  return fit_mlp(data, split, student_features, cfg, "mlp", [&](const Matrix& logits) {
    return StepResult{
        supervised_loss(logits, data.labels, split.labeled, node_weights, cfg.loss.delta1,
                        cfg.loss.delta2),
        supervised_logit_gradient(logits, data.labels, split.labeled, node_weights,
                                  cfg.loss.delta1, cfg.loss.delta2)};
  });
}

std::string_view to_string(WeightSource source) {
  switch (source) {
    case WeightSource::kInfluence: return "influence";
    case WeightSource::kDegree: return "degree";
    case WeightSource::kPageRank: return "pagerank";
    case WeightSource::kNone: return "none";
  }
  return "none";
}

Pipeline::Pipeline(const Dataset& data, const Split& split, TrainConfig cfg, PropagationCache* cache)
    : view_(make_view(data, split)), cfg_(std::move(cfg)), cache_(cache) {
  cfg_.validate();
}

const Trained<GcnParams>& Pipeline::teacher() {
  if (!teacher_) {
    teacher_ = train_teacher(view_.train, view_.train_split, cfg_);
    if (view_.inductive && !view_.eval_test.empty()) {
      const auto a = normalize_adjacency(view_.eval.graph);
      const auto t0 = Clock::now();
      const Matrix logits = gcn_forward(teacher_->params, a, view_.eval.features);
      teacher_->report.timings.teacher_inference = millis_since(t0);
      teacher_->report.test_acc = accuracy(logits, view_.eval.labels, view_.eval_test);
    }
  }
  return *teacher_;
}

const Matrix& Pipeline::teacher_train_logits() {
  if (teacher_logits_.rows() == 0)
    teacher_logits_ = teacher_logits(teacher().params, view_.train.graph, view_.train.features);
  return teacher_logits_;
}

Vector Pipeline::node_weights(WeightSource source, const TrainConfig& cfg) {
  return weight_entry(source, cfg).first;
}

const std::pair<Vector, double>& Pipeline::weight_entry(WeightSource source, const TrainConfig& cfg) {
  const std::size_t k = source == WeightSource::kInfluence ? cfg.influence_k : 0;
  const int mode = source == WeightSource::kInfluence ? static_cast<int>(cfg.influence_mode) : 0;
  const auto key = std::make_tuple(static_cast<int>(source), k, mode);
  auto it = weights_.find(key);
  if (it == weights_.end()) {
    const auto t0 = Clock::now();
    Vector w;
    switch (source) {
      case WeightSource::kInfluence: {
        InfluenceOptions opt;
        opt.k = cfg.influence_k;
        opt.mode = cfg.influence_mode;
        w = compute_influence(view_.train.graph, view_.train.features, opt).gis;
        break;
      }
      case WeightSource::kDegree: w = degree_centrality(view_.train.graph).scores; break;
      case WeightSource::kPageRank: w = pagerank(view_.train.graph).scores; break;
      case WeightSource::kNone: w.assign(view_.train.num_nodes(), 0.0); break;
    }
    it = weights_.emplace(key, std::make_pair(std::move(w), millis_since(t0))).first;
  }
  return it->second;
}

const Pipeline::Features& Pipeline::features(std::size_t hops, PoolMode pool) {
  const auto key = std::make_pair(hops, static_cast<int>(pool));
  auto it = features_.find(key);
  if (it == features_.end()) {
    Features f;
    const auto t0 = Clock::now();
    f.train = student_input(view_.train.graph, view_.train.features, hops, pool, cache_).matrix;
    f.millis = millis_since(t0);
    // Test-time input is recomputed on the evaluation graph.
    f.eval = view_.inductive
                 ? student_input(view_.eval.graph, view_.eval.features, hops, pool, cache_).matrix
                 : f.train;
    it = features_.emplace(key, std::move(f)).first;
  }
  return it->second;
}

Trained<MlpParams> Pipeline::student(const StudentArm& arm, const TrainConfig& cfg) {
  cfg.validate();
  TrainConfig effective = cfg;
  effective.seed = cfg_.seed;
  if (!arm.propagate) effective.hops = 0;
  const Features& x = features(effective.hops, effective.pool);
  const auto& [w, weight_ms] = weight_entry(arm.weights, effective);

  static const Matrix kNoTeacher;
  const Matrix& logits = effective.loss.lambda == 1.0 ? kNoTeacher : teacher_train_logits();
  auto out = train_student(view_.train, view_.train_split, logits, w, x.train, effective);
  out.report.model = arm.name;
  if (effective.loss.lambda != 1.0) {
    out.report.timings.teacher_train = teacher().report.timings.teacher_train;
    out.report.timings.teacher_inference = teacher().report.timings.teacher_inference;
  }
  out.report.timings.influence = weight_ms;
  out.report.timings.propagation = x.millis;
  if (!view_.eval_test.empty()) {
    const auto t0 = Clock::now();
    const Matrix test_logits = mlp_forward(out.params, x.eval).logits;
    out.report.timings.student_inference = millis_since(t0);
    out.report.test_acc = accuracy(test_logits, view_.eval.labels, view_.eval_test);
  }
  return out;
}

}  // namespace infgrand
