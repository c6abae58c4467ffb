#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "infgrand/config.hpp"
#include "infgrand/dataset.hpp"
#include "infgrand/error.hpp"
#include "infgrand/splits.hpp"
#include "infgrand/synthetic.hpp"
#include "infgrand/training.hpp"

using namespace infgrand;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = INFGRAND_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("infgrand_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string error_of(const fs::path& dir) {
  try {
    load_dataset(dir);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LoadDataset, TwoNodeFixture) {
  const Dataset d = load_dataset(kFixtures / "two_node");
  EXPECT_EQ(d.name, "two_node");
  EXPECT_EQ(d.num_nodes(), 2u);
  EXPECT_EQ(d.num_classes, 2u);
  EXPECT_EQ(d.graph.num_edges(), 1u);
  EXPECT_EQ(d.features, (Matrix{{1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1}));
}

TEST(LoadDataset, ThreeNodeFixtureWithSplit) {
  const Dataset d = load_dataset(kFixtures / "three_node");
  EXPECT_EQ(d.graph.num_edges(), 2u);
  EXPECT_TRUE(d.graph.has_edge(1, 2));
  const Split s = load_split(kFixtures / "three_node" / "split.json");
  EXPECT_EQ(s.labeled, (std::vector<NodeId>{0, 2}));
  EXPECT_EQ(s.validation, (std::vector<NodeId>{1}));
  EXPECT_TRUE(s.test.empty());
  EXPECT_FALSE(s.observed.has_value());
  EXPECT_NO_THROW(s.validate(3));
}

TEST(LoadDataset, SaveLoadIsIdentity) {
  TempDir tmp("roundtrip");
  const Dataset d = generate_synthetic({.num_nodes = 80, .num_classes = 4, .feature_dim = 5, .seed = 3});
  for (bool binary : {false, true}) {
    const fs::path dir = tmp.path / (binary ? "bin" : "txt");
    save_dataset(dir, d, binary);
    Dataset back = load_dataset(dir);
    EXPECT_EQ(back.graph, d.graph);
    EXPECT_EQ(back.features, d.features);
    EXPECT_EQ(back.labels, d.labels);
    EXPECT_EQ(back.num_classes, d.num_classes);
    EXPECT_EQ(dataset_hash(back), dataset_hash(d));
  }
}

TEST(LoadDataset, BinaryFeaturesTakePrecedence) {
  TempDir tmp("binfeat");
  Dataset d = load_dataset(kFixtures / "two_node");
  save_dataset(tmp.path, d);
  const Matrix other{{0.25, -1e300}, {3.0, 4.0}};
  write_features_bin(tmp.path / "features.bin", other);
  EXPECT_EQ(load_dataset(tmp.path).features, other);
  EXPECT_EQ(read_features_bin(tmp.path / "features.bin"), other);
}

TEST(LoadDataset, BinaryHeaderLayout) {
  TempDir tmp("binlayout");
  write_features_bin(tmp.path / "f.bin", Matrix{{1.5}});
  std::ifstream in(tmp.path / "f.bin", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 8 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "IGND");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[16], 1);
  // 1.5 = 0x3FF8000000000000, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[31]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[30]), 0xF8);
  write(tmp.path / "bad.bin", "IGNX");
  EXPECT_THROW(read_features_bin(tmp.path / "bad.bin"), IoError);
}

TEST(LoadDataset, CorruptFeatureLineNamesFileAndLine) {
  TempDir tmp("corrupt");
  save_dataset(tmp.path, load_dataset(kFixtures / "three_node"));
  write(tmp.path / "features.txt", "1 0\n0.5 abc\n0 1\n");
  const std::string msg = error_of(tmp.path);
  EXPECT_NE(msg.find("features.txt:2"), std::string::npos) << msg;

  write(tmp.path / "features.txt", "1 0\n0.5\n0 1\n");
  EXPECT_NE(error_of(tmp.path).find("features.txt:2"), std::string::npos);
  write(tmp.path / "features.txt", "1 0\n0.5 0.5\n0 nan\n");
  EXPECT_NE(error_of(tmp.path).find("features.txt:3"), std::string::npos);
}

TEST(LoadDataset, OtherErrors) {
  TempDir tmp("errors");
  EXPECT_THROW(load_dataset(tmp.path / "nope"), IoError);
  save_dataset(tmp.path, load_dataset(kFixtures / "three_node"));
  fs::remove(tmp.path / "labels.txt");
  EXPECT_NE(error_of(tmp.path).find("labels.txt"), std::string::npos);
  write(tmp.path / "labels.txt", "0\n1\n");
  EXPECT_NE(error_of(tmp.path).find("rows"), std::string::npos);
  write(tmp.path / "labels.txt", "0\n-1\n1\n");
  EXPECT_NE(error_of(tmp.path).find("labels.txt:2"), std::string::npos);
  write(tmp.path / "labels.txt", "0\n1\n1\n");
  write(tmp.path / "edges.txt", "0 1\n1 7\n");
  EXPECT_NE(error_of(tmp.path).find("edges.txt"), std::string::npos);
  write(tmp.path / "edges.txt", "0 1\n1 2 3\n");
  EXPECT_NE(error_of(tmp.path).find("edges.txt:2"), std::string::npos);
}

TEST(Split, JsonRoundTripAndValidation) {
  TempDir tmp("split");
  Split s{.labeled = {0, 4}, .validation = {1}, .test = {2, 3}, .observed = std::vector<NodeId>{0, 1, 4}};
  save_split(tmp.path / "split.json", s);
  EXPECT_EQ(load_split(tmp.path / "split.json"), s);
  EXPECT_NO_THROW(s.validate(5));
  EXPECT_THROW(s.validate(4), InputError);
  Split overlap{.labeled = {0, 1}, .validation = {1}, .test = {}};
  EXPECT_THROW(overlap.validate(3), InputError);
  Split unobserved{.labeled = {2}, .validation = {}, .test = {}, .observed = std::vector<NodeId>{0}};
  EXPECT_THROW(unobserved.validate(3), InputError);
  write(tmp.path / "bad.json", "{\"labeled\": [0]}");
  EXPECT_THROW(load_split(tmp.path / "bad.json"), IoError);
}

TEST(DatasetHash, SensitiveToEveryField) {
  const Dataset d = generate_synthetic({.num_nodes = 50, .seed = 1});
  const std::string h = dataset_hash(d);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(dataset_hash(generate_synthetic({.num_nodes = 50, .seed = 1})), h);
  Dataset f = d;
  f.features(7, 3) = std::nextafter(f.features(7, 3), 1e9);
  EXPECT_NE(dataset_hash(f), h);
  Dataset l = d;
  l.labels[0] = (l.labels[0] + 1) % 3;
  EXPECT_NE(dataset_hash(l), h);
  std::vector<NodeId> all(50);
  for (NodeId i = 0; i < 50; ++i) all[i] = i;
  Dataset g = d.induced(std::span<const NodeId>(all).first(49));
  EXPECT_NE(dataset_hash(g), h);
}

TEST(Synthetic, DeterministicAndSeedSensitive) {
  const SyntheticSpec spec{.num_nodes = 200, .seed = 5};
  EXPECT_EQ(dataset_hash(generate_synthetic(spec)), dataset_hash(generate_synthetic(spec)));
  EXPECT_NE(dataset_hash(generate_synthetic(spec)), dataset_hash(generate_synthetic({.num_nodes = 200, .seed = 6})));
}

TEST(Synthetic, ShapeAndBalancedLabels) {
  const Dataset d = generate_synthetic({.num_nodes = 301, .num_classes = 3, .feature_dim = 7, .seed = 2});
  EXPECT_NO_THROW(d.validate());
  EXPECT_EQ(d.features.cols(), 7u);
  std::vector<int> counts(3, 0);
  for (int l : d.labels) ++counts[l];
  EXPECT_EQ(counts, (std::vector<int>{101, 100, 100}));
}

TEST(Synthetic, NoCrossEdgesWhenInterIsZero) {
  const Dataset d = generate_synthetic({.num_nodes = 200, .num_classes = 2, .p_intra = 0.05, .p_inter = 0.0, .seed = 9});
  EXPECT_GT(d.graph.num_edges(), 0u);
  for (const auto& e : d.graph.undirected_edges()) EXPECT_EQ(d.labels[e.u], d.labels[e.v]);
  EXPECT_EQ(edge_homophily(d), 1.0);
}

TEST(Synthetic, EdgeDensityAndHomophilyMatchProbabilities) {
  const SyntheticSpec spec{.num_nodes = 900, .num_classes = 3, .p_intra = 0.02, .p_inter = 0.004, .seed = 4};
  const Dataset d = generate_synthetic(spec);
  const double intra_pairs = 3.0 * 300.0 * 299.0 / 2.0;
  const double inter_pairs = 3.0 * 300.0 * 300.0;
  const double expected_intra = spec.p_intra * intra_pairs;
  const double expected_inter = spec.p_inter * inter_pairs;
  std::size_t intra = 0, inter = 0;
  for (const auto& e : d.graph.undirected_edges()) (d.labels[e.u] == d.labels[e.v] ? intra : inter) += 1;
  EXPECT_NEAR(static_cast<double>(intra), expected_intra, 5.0 * std::sqrt(expected_intra));
  EXPECT_NEAR(static_cast<double>(inter), expected_inter, 5.0 * std::sqrt(expected_inter));
  // Homophily exceeds the share of intra-class pairs.
  EXPECT_GT(edge_homophily(d), intra_pairs / (intra_pairs + inter_pairs));
  EXPECT_NEAR(edge_homophily(d), expected_intra / (expected_intra + expected_inter), 0.05);
}

TEST(Synthetic, RejectsInvalidSpecs) {
  EXPECT_THROW(generate_synthetic({.p_intra = 1.5}), InputError);
  EXPECT_THROW(generate_synthetic({.p_inter = -0.1}), InputError);
  EXPECT_THROW(generate_synthetic({.num_nodes = 2, .num_classes = 3}), InputError);
  EXPECT_THROW(generate_synthetic({.noise = -1.0}), InputError);
}

TEST(Synthetic, WellSeparatedClassesAreEasyForAnMlp) {
  const Dataset d = generate_synthetic({.num_nodes = 400, .num_classes = 4, .feature_dim = 16, .separation = 6.0,
                                        .noise = 0.5, .seed = 11});
  const Split s = make_transductive_split(d.labels, d.num_classes, 10, 80, 200, 0);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  const std::vector<double> zero(d.num_nodes(), 0.0);
  const auto run = train_supervised_mlp(d, s, zero, d.features, cfg);
  EXPECT_GT(run.report.test_acc, 0.9);
}
