#include "infgrand/config.hpp"

#include <fstream>

#include "infgrand/error.hpp"

namespace infgrand {

std::string_view to_string(Setting setting) {
  return setting == Setting::kTransductive ? "transductive" : "inductive";
}

Setting parse_setting(std::string_view text) {
  if (text == "transductive") return Setting::kTransductive;
  if (text == "inductive") return Setting::kInductive;
  throw InputError("unknown setting '" + std::string(text) + "' (expected transductive|inductive)");
}

void TrainConfig::validate() const {
  loss.validate();
  if (max_epochs < 1) throw InputError("max_epochs must be at least 1");
  if (patience < 1) throw InputError("patience must be at least 1");
  if (influence_k < 1) throw InputError("influence_k must be at least 1");
  if (teacher_hidden == 0 || student_hidden == 0) throw InputError("hidden widths must be positive");
  if (teacher_layers < 2) throw InputError("teacher_layers must be at least 2");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw InputError("weight_decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("dropout must lie in [0, 1)");
  if (!(observed_fraction > 0.0 && observed_fraction <= 1.0))
    throw InputError("observed_fraction must lie in (0, 1]");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"lambda", c.loss.lambda},
      {"delta1", c.loss.delta1},
      {"delta2", c.loss.delta2},
      {"gamma1", c.loss.gamma1},
      {"gamma2", c.loss.gamma2},
      {"tau", c.loss.tau},
      {"hops", c.hops},
      {"pool", std::string(to_string(c.pool))},
      {"influence_k", c.influence_k},
      {"influence_mode", std::string(to_string(c.influence_mode))},
      {"teacher_hidden", c.teacher_hidden},
      {"student_hidden", c.student_hidden},
      {"teacher_layers", c.teacher_layers},
      {"learning_rate", c.learning_rate},
      {"weight_decay", c.weight_decay},
      {"dropout", c.dropout},
      {"max_epochs", c.max_epochs},
      {"patience", c.patience},
      {"seed", c.seed},
      {"setting", std::string(to_string(c.setting))},
      {"labels_per_class", c.labels_per_class},
      {"val_size", c.val_size},
      {"test_size", c.test_size},
      {"observed_fraction", c.observed_fraction},
  };
}

namespace {

std::size_t count(const nlohmann::json& v) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw InputError("expected a non-negative integer, got " + v.dump());
  return v.get<std::uint64_t>();
}

}  // namespace

TrainConfig config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    try {
      if (key == "lambda") c.loss.lambda = v.get<double>();
      else if (key == "delta1") c.loss.delta1 = v.get<double>();
      else if (key == "delta2") c.loss.delta2 = v.get<double>();
      else if (key == "gamma1") c.loss.gamma1 = v.get<double>();
      else if (key == "gamma2") c.loss.gamma2 = v.get<double>();
      else if (key == "tau") c.loss.tau = v.get<double>();
      else if (key == "hops") c.hops = count(v);
      else if (key == "pool") c.pool = parse_pool_mode(v.get<std::string>());
      else if (key == "influence_k") c.influence_k = count(v);
      else if (key == "influence_mode") c.influence_mode = parse_influence_mode(v.get<std::string>());
      else if (key == "teacher_hidden") c.teacher_hidden = count(v);
      else if (key == "student_hidden") c.student_hidden = count(v);
      else if (key == "teacher_layers") c.teacher_layers = count(v);
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "weight_decay") c.weight_decay = v.get<double>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "max_epochs") c.max_epochs = count(v);
      else if (key == "patience") c.patience = count(v);
      else if (key == "seed") c.seed = count(v);
      else if (key == "setting") c.setting = parse_setting(v.get<std::string>());
      else if (key == "labels_per_class") c.labels_per_class = count(v);
      else if (key == "val_size") c.val_size = count(v);
      else if (key == "test_size") c.test_size = count(v);
      else if (key == "observed_fraction") c.observed_fraction = v.get<double>();
      else throw InputError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw InputError("config key '" + key + "' has the wrong type: " + v.dump());
    } catch (const InputError& e) {
      throw InputError("config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(TrainConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw InputError("override '" + std::string(assignment) + "' is not key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  cfg = config_from_json(nlohmann::json{{key, value}}, cfg);
}

}  // namespace infgrand
