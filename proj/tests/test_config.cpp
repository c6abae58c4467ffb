#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "infgrand/config.hpp"
#include "infgrand/error.hpp"

using namespace infgrand;

TEST(TrainConfig, DefaultsAreValid) {
  const TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.loss.lambda, 0.1);
  EXPECT_EQ(c.hops, 2u);
  EXPECT_EQ(c.pool, PoolMode::kMean);
  EXPECT_EQ(c.max_epochs, 500u);
  EXPECT_EQ(c.patience, 50u);
  EXPECT_EQ(c.setting, Setting::kTransductive);
}

TEST(TrainConfig, JsonRoundTrip) {
  TrainConfig c;
  c.loss.lambda = 0.3;
  c.loss.tau = 2.0;
  c.pool = PoolMode::kMax;
  c.influence_mode = InfluenceMode::kKHop;
  c.setting = Setting::kInductive;
  c.seed = 123456789012345ULL;
  c.observed_fraction = 0.8;
  const auto j = to_json(c);
  EXPECT_EQ(j.at("lambda"), 0.3);
  EXPECT_EQ(j.at("pool"), "max");
  EXPECT_EQ(j.at("setting"), "inductive");
  EXPECT_EQ(config_from_json(j), c);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(j.dump())), c);
}

TEST(TrainConfig, PartialJsonKeepsBase) {
  TrainConfig base;
  base.hops = 4;
  const auto c = config_from_json(nlohmann::json{{"lambda", 0.5}}, base);
  EXPECT_EQ(c.loss.lambda, 0.5);
  EXPECT_EQ(c.hops, 4u);
}

TEST(TrainConfig, RejectsUnknownKeysWrongTypesAndBadValues) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"lamda", 0.1}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"hops", "two"}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"hops", -1}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"hops", 2.5}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"lambda", 1.5}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"tau", 0.0}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"max_epochs", 0}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"patience", 0}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"dropout", 1.0}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"pool", "median"}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"setting", "semi"}}), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), InputError);
}

TEST(TrainConfig, Overrides) {
  TrainConfig c;
  apply_override(c, "lambda=0.4");
  apply_override(c, "pool=min");
  apply_override(c, "influence_mode=khop");
  apply_override(c, "hops=3");
  EXPECT_EQ(c.loss.lambda, 0.4);
  EXPECT_EQ(c.pool, PoolMode::kMin);
  EXPECT_EQ(c.influence_mode, InfluenceMode::kKHop);
  EXPECT_EQ(c.hops, 3u);
  EXPECT_THROW(apply_override(c, "lambda"), InputError);
  EXPECT_THROW(apply_override(c, "=3"), InputError);
  EXPECT_THROW(apply_override(c, "nope=3"), InputError);
}

TEST(TrainConfig, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "infgrand_cfg.json";
  std::ofstream(path) << R"({"lambda": 0.2, "student_hidden": 32})";
  const auto c = load_config(path);
  EXPECT_EQ(c.loss.lambda, 0.2);
  EXPECT_EQ(c.student_hidden, 32u);
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_config(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), IoError);
}
