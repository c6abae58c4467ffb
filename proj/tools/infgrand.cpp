#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infgrand/centrality.hpp"
#include "infgrand/checkpoint.hpp"
#include "infgrand/error.hpp"
#include "infgrand/experiments.hpp"
#include "infgrand/gcn.hpp"
#include "infgrand/hash.hpp"
#include "infgrand/influence.hpp"
#include "infgrand/mlp.hpp"
#include "infgrand/propagation.hpp"
#include "infgrand/synthetic.hpp"
#include "infgrand/training.hpp"

namespace fs = std::filesystem;
using namespace infgrand;

namespace {

constexpr int kAssertionFailed = 1;
constexpr int kUsageError = 2;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::string data;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
  cmd->add_option("--config", c.config, "Manifest JSON (dataset, config, seeds, ...)");
  cmd->add_option("--set", c.sets, "Override key=value (repeatable)");
  cmd->add_option("--data", c.data, "Dataset directory (overrides the manifest dataset)");
  auto* out = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
}

ExperimentManifest build_manifest(const Common& c, std::optional<ExperimentKind> kind) {
  ExperimentManifest m = c.config.empty() ? ExperimentManifest{} : load_manifest(c.config);
  if (kind) m.kind = *kind;
  if (!c.data.empty()) {
    m.dataset = DatasetRef{};
    m.dataset.path = c.data;
  }
  for (const auto& s : c.sets) apply_manifest_override(m, s);
  if (!c.out.empty()) m.out = c.out;
  if (!m.dataset.path && !m.dataset.synthetic)
    throw InputError("no dataset: pass --data DIR or a manifest with a dataset entry");
  return m;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json run_header(const ExperimentManifest& m, const Dataset& data) {
  return {{"tool", "infgrand"},
          {"version", std::string(version())},
          {"manifest", to_json(m)},
          {"config", to_json(m.config)},
          {"seeds", {m.config.seed}},
          {"dataset_hashes", {dataset_hash(data)}}};
}

void write_runs(const fs::path& dir, nlohmann::json report, const std::vector<RunReport>& runs) {
  fs::create_directories(dir);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : runs) arr.push_back(to_json(r));
  report["runs"] = arr;
  write_json(dir / "report.json", report);
  std::ofstream csv(dir / "epochs.csv");
  write_epochs_csv_header(csv);
  for (const auto& r : runs) write_epochs_csv(csv, r);
}

int finish_experiment(const ExperimentManifest& m) {
  const auto result = run_experiment(m);
  write_outputs(m.out, result);
  for (const auto& a : result.arms)
    std::cout << a.name << ": mean " << a.mean << " std " << a.std << '\n';
  for (const auto& a : result.assertions)
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " (" << a.detail << ")\n";
  std::cout << "report written to " << (m.out / "report.json").string() << '\n';
  return result.passed() ? EXIT_SUCCESS : kAssertionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence-guided GNN-to-MLP distillation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  Common common;
  std::string teacher_ckpt;
  std::string checkpoint;
  std::string model_kind = "mlp";
  std::string mode = "dense";
  std::size_t k = 2;
  std::size_t hops = 2;
  std::string pool = "mean";
  std::string knob;
  std::vector<std::string> values;
  std::string spec_path;
  std::vector<std::string> spec_sets;

  auto* train_teacher_cmd = app.add_subcommand("train-teacher", "Train the GCN teacher");
  add_common(train_teacher_cmd, common);
  auto* distill_cmd = app.add_subcommand("distill", "Train teacher (or load one) and distill the MLP student");
  add_common(distill_cmd, common);
  distill_cmd->add_option("--teacher", teacher_ckpt, "Teacher checkpoint to reuse");
  auto* eval_cmd = app.add_subcommand("eval", "Test accuracy of a checkpoint");
  add_common(eval_cmd, common, false);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--model", model_kind, "mlp|gcn")->check(CLI::IsMember({"mlp", "gcn"}));

  struct Experiment {
    const char* name;
    const char* help;
    ExperimentKind kind;
    CLI::App* cmd = nullptr;
  };
  std::vector<Experiment> experiments = {
      {"main", "Teacher, distilled student and supervised MLP over seeds", ExperimentKind::kMain},
      {"q1", "Teacher trained on high- vs low-influence labeled subsets", ExperimentKind::kQ1},
      {"label-scarce", "Accuracy with 2/4/8 labels per class", ExperimentKind::kLabelScarce},
      {"ablate", "Full model vs single-component arms", ExperimentKind::kAblation},
      {"sweep", "One-knob sensitivity grid", ExperimentKind::kSensitivity},
      {"timing", "Single-forward latency of MLP vs GCN", ExperimentKind::kTiming},
      {"centrality-swap", "Distillation with influence, degree and PageRank weights", ExperimentKind::kCentrality},
  };
  for (auto& e : experiments) {
    e.cmd = app.add_subcommand(e.name, e.help);
    add_common(e.cmd, common);
  }
  CLI::App* sweep_cmd = experiments[4].cmd;
  sweep_cmd->add_option("--knob", knob, "lambda|gamma2|delta2|P|pool|k");
  sweep_cmd->add_option("--values", values, "Grid values")->delimiter(',');
  auto* run_cmd = app.add_subcommand("run", "Run the experiment named by the manifest's kind");
  add_common(run_cmd, common, false);

  auto* influence_cmd = app.add_subcommand("influence", "Compute and cache global influence scores");
  add_common(influence_cmd, common);
  influence_cmd->add_option("--mode", mode, "dense|khop")->check(CLI::IsMember({"dense", "khop", "k-hop"}));
  influence_cmd->add_option("--k", k, "Propagation depth");
  auto* propagate_cmd = app.add_subcommand("propagate", "Precompute pooled multi-hop features");
  add_common(propagate_cmd, common);
  propagate_cmd->add_option("--p", hops, "Number of hops");
  propagate_cmd->add_option("--pool", pool, "mean|max|min")->check(CLI::IsMember({"mean", "max", "min"}));
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic dataset directory");
  generate_cmd->add_option("--spec", spec_path, "Synthetic spec JSON");
  generate_cmd->add_option("--set", spec_sets, "Spec override key=value (repeatable)");
  generate_cmd->add_option("--out", common.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_teacher_cmd) {
      const auto m = build_manifest(common, std::nullopt);
      const Dataset data = resolve_dataset(m.dataset, m.config.seed);
      Pipeline p(data, resolve_split(m.dataset, data, m.config, m.config.seed), m.config);
      const auto& t = p.teacher();
      fs::create_directories(m.out);
      save_checkpoint(m.out / "teacher.ckpt", t.params, {m.config.seed, t.report.epochs.size()});
      write_runs(m.out, run_header(m, data), {t.report});
      std::cout << "teacher test accuracy " << t.report.test_acc << '\n';
      return EXIT_SUCCESS;
    }
    if (*distill_cmd) {
      const auto m = build_manifest(common, std::nullopt);
      const Dataset data = resolve_dataset(m.dataset, m.config.seed);
      const Split split = resolve_split(m.dataset, data, m.config, m.config.seed);
      const SplitView view = make_view(data, split);
      std::vector<RunReport> runs;
      GcnParams teacher;
      if (teacher_ckpt.empty()) {
        auto t = train_teacher(view.train, view.train_split, m.config);
        teacher = t.params;
        runs.push_back(t.report);
      } else {
        teacher = load_gcn_checkpoint(teacher_ckpt);
      }
      const Matrix logits = teacher_logits(teacher, view.train.graph, view.train.features);
      InfluenceOptions opt;
      opt.k = m.config.influence_k;
      opt.mode = m.config.influence_mode;
      const auto influence = compute_influence(view.train.graph, view.train.features, opt);
      const auto xtilde = student_input(view.train.graph, view.train.features, m.config.hops, m.config.pool);
      auto s = train_student(view.train, view.train_split, logits, influence, xtilde, m.config);
      if (!view.eval_test.empty()) {
        const auto x_eval = view.inductive
                                ? student_input(view.eval.graph, view.eval.features, m.config.hops, m.config.pool).matrix
                                : xtilde.matrix;
        s.report.test_acc = evaluate(s.params, x_eval, view.eval.labels, view.eval_test);
      }
      fs::create_directories(m.out);
      save_checkpoint(m.out / "teacher.ckpt", teacher, {m.config.seed, 0});
      save_checkpoint(m.out / "student.ckpt", s.params, {m.config.seed, s.report.epochs.size()});
      runs.push_back(s.report);
      write_runs(m.out, run_header(m, data), runs);
      std::cout << "student test accuracy " << s.report.test_acc << '\n';
      return EXIT_SUCCESS;
    }
    if (*eval_cmd) {
      const auto m = build_manifest(common, std::nullopt);
      const Dataset data = resolve_dataset(m.dataset, m.config.seed);
      const SplitView view = make_view(data, resolve_split(m.dataset, data, m.config, m.config.seed));
      double acc = 0.0;
      if (model_kind == "gcn") {
        acc = evaluate(load_gcn_checkpoint(checkpoint), normalize_adjacency(view.eval.graph),
                       view.eval.features, view.eval.labels, view.eval_test);
      } else {
        const auto x = student_input(view.eval.graph, view.eval.features, m.config.hops, m.config.pool);
        acc = evaluate(load_mlp_checkpoint(checkpoint), x.matrix, view.eval.labels, view.eval_test);
      }
      std::cout << "test accuracy " << acc << '\n';
      if (!m.out.empty()) {
        fs::create_directories(m.out);
        auto report = run_header(m, data);
        report["checkpoint"] = checkpoint;
        report["model"] = model_kind;
        report["test_acc"] = acc;
        write_json(m.out / "report.json", report);
      }
      return EXIT_SUCCESS;
    }
    for (const auto& e : experiments) {
      if (!*e.cmd) continue;
      auto m = build_manifest(common, e.kind);
      if (!knob.empty()) m.knob = knob;
      if (!values.empty()) {
        m.values.clear();
        for (const auto& v : values) {
          auto j = nlohmann::json::parse(v, nullptr, false);
          m.values.push_back(j.is_discarded() ? nlohmann::json(v) : j);
        }
      }
      return finish_experiment(m);
    }
    if (*run_cmd) {
      auto m = build_manifest(common, std::nullopt);
      if (m.out.empty()) throw InputError("no output directory: pass --out or set out in the manifest");
      return finish_experiment(m);
    }
    if (*influence_cmd) {
      const auto m = build_manifest(common, std::nullopt);
      const Dataset data = resolve_dataset(m.dataset, m.config.seed);
      InfluenceOptions opt;
      opt.k = k;
      opt.mode = parse_influence_mode(mode);
      auto table = compute_influence(data.graph, data.features, opt);
      if (m.out.has_parent_path()) fs::create_directories(m.out.parent_path());
      save_influence_cache(m.out, table);
      std::cout << "wrote influence for " << table.gis.size() << " nodes to " << m.out.string() << '\n';
      return EXIT_SUCCESS;
    }
    if (*propagate_cmd) {
      const auto m = build_manifest(common, std::nullopt);
      const Dataset data = resolve_dataset(m.dataset, m.config.seed);
      const auto x = student_input(data.graph, data.features, hops, parse_pool_mode(pool));
      if (m.out.has_parent_path()) fs::create_directories(m.out.parent_path());
      save_pooled_features(m.out, x);
      std::cout << "wrote " << x.matrix.rows() << " x " << x.matrix.cols() << " features to "
                << m.out.string() << '\n';
      return EXIT_SUCCESS;
    }
    if (*generate_cmd) {
      nlohmann::json spec = nlohmann::json::object();
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw IoError("cannot open spec " + spec_path);
        in >> spec;
      }
      for (const auto& s : spec_sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw InputError("override '" + s + "' is not key=value");
        spec[s.substr(0, eq)] = nlohmann::json::parse(s.substr(eq + 1));
      }
      ExperimentManifest m = manifest_from_json({{"dataset", {{"synthetic", spec}}}});
      const Dataset data = resolve_dataset(m.dataset, 0);
      save_dataset(common.out, data);
      std::cout << "wrote " << data.num_nodes() << " nodes, " << data.graph.num_edges()
                << " edges, homophily " << edge_homophily(data) << '\n';
      return EXIT_SUCCESS;
    }
  } catch (const infgrand::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return EXIT_SUCCESS;
}
