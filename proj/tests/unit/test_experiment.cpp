#include <gtest/gtest.h>

#include <sstream>

#include "rebal/experiment.hpp"
#include "support/workspace.hpp"

using namespace rebal;
namespace fs = std::filesystem;

namespace {

ExperimentConfig config_for(const std::string& input, const fs::path& out) {
  ExperimentConfig c;
  c.input = input;
  c.out = out.string();
  c.epochs = 3;
  return c;
}

json read_json(const fs::path& p) { return json::parse(workspace::slurp(p)); }

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, ParsesKeyValueLinesWithComments) {
  std::istringstream in(
      "# experiment\n"
      "input = data.csv\n"
      "\n"
      "seed=7   # trailing comment\n"
      "algorithm = smote\n"
      "bins = -0.5, 0.25\n"
      "order = asc\n"
      "seed = 9\n");
  ExperimentConfig c;
  parse_config(in, c, "exp.conf");
  EXPECT_EQ(c.input, "data.csv");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.algorithm, Algorithm::smote);
  EXPECT_EQ(c.bin_low, -0.5);
  EXPECT_EQ(c.bin_high, 0.25);
  EXPECT_EQ(c.order, RemovalOrder::ascending);
}

TEST(Config, ErrorsNameSourceAndLine) {
  std::istringstream in("seed = 1\nk = 3\nwidth = 4\n");
  ExperimentConfig c;
  try {
    parse_config(in, c, "exp.conf");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exp.conf:3:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("unknown config key 'width'"), std::string::npos);
  }
  std::istringstream no_eq("seed 1\n");
  EXPECT_THROW(parse_config(no_eq, c), ConfigError);
  EXPECT_THROW(apply_setting(c, "k", "-2"), ConfigError);
  EXPECT_THROW(apply_setting(c, "bins", "0.5,-0.5"), ConfigError);
  EXPECT_THROW(apply_setting(c, "order", "sideways"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/exp.conf"), IoError);
}

TEST(Config, FractionRangesAndLists) {
  EXPECT_EQ(parse_fractions("0.05:0.95:0.05"), ExperimentConfig{}.fractions);
  EXPECT_EQ(parse_fractions("0.05:0.95:0.05").size(), 19u);
  EXPECT_EQ(parse_fractions("0.5"), std::vector<double>{0.5});
  EXPECT_EQ(parse_fractions("0.1, 0.3"), (std::vector<double>{0.1, 0.3}));
  EXPECT_THROW(parse_fractions("0.3,0.1"), ConfigError);
  EXPECT_THROW(parse_fractions("0,0.5"), ConfigError);
  EXPECT_THROW(parse_fractions("0.5,1"), ConfigError);
}

TEST(Config, EntriesRoundTrip) {
  ExperimentConfig c;
  c.input = "x.csv";
  c.seed = 123;
  c.algorithm = std::nullopt;
  c.fractions = {0.1, 0.2};
  c.hidden_activation = Activation::sigmoid;
  c.learning_rate = 0.003;
  std::ostringstream text;
  for (const auto& [k, v] : config_entries(c)) text << k << " = " << v << '\n';
  std::istringstream in(text.str());
  ExperimentConfig back;
  parse_config(in, back);
  EXPECT_EQ(config_entries(back), config_entries(c));
  EXPECT_FALSE(back.algorithm);
}

TEST(Config, ValidateRejectsInconsistentSettings) {
  ExperimentConfig c;
  EXPECT_THROW(validate(c), ConfigError);
  c.input = "synth:default";
  EXPECT_NO_THROW(validate(c));
  c.folds = 1;
  EXPECT_THROW(validate(c), ConfigError);
  c.folds = 0;
  c.train_fraction = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

// ---------------------------------------------------------------- commands

TEST(Commands, OutputNaming) {
  EXPECT_EQ(output_file("o", "rebalance", "smote", 42, "csv").filename(), "rebalance-smote-42.csv");
  EXPECT_EQ(output_file("o", "evaluate", "g1no", 1, "json", "metrics").filename(), "evaluate-g1no-1-metrics.json");
}

TEST(Commands, SilhouetteOnSeparatedClustersIsReproducible) {
  const auto dir = workspace::scratch();
  const auto c = config_for("synth:two-cluster", dir);
  const auto out = cmd_silhouette(c);
  ASSERT_EQ(out.files.size(), 2u);
  EXPECT_EQ(out.files[0].filename(), "silhouette-none-42.csv");
  EXPECT_GT(out.report.bins.near_positive, out.report.bins.near_zero + out.report.bins.near_negative);
  const auto first = workspace::slurp(out.files[0]);
  const auto summary = read_json(out.files[1]);
  EXPECT_EQ(summary["samples"], 1000);
  EXPECT_EQ(summary["bins"]["near_+1"]["count"], out.report.bins.near_positive);
  cmd_silhouette(c);
  EXPECT_EQ(workspace::slurp(out.files[0]), first);
}

TEST(Commands, MissingInputNamesThePath) {
  const auto dir = workspace::scratch();
  try {
    cmd_silhouette(config_for((dir / "absent.csv").string(), dir));
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.csv"), std::string::npos);
  }
}

TEST(Commands, SweepWritesOneRowPerFraction) {
  const auto dir = workspace::scratch();
  auto c = config_for("synth:two-cluster", dir);
  c.fractions = {0.1, 0.5, 0.9};
  const auto desc = cmd_imbalance_sweep(c);
  EXPECT_EQ(desc.result.records.size(), 3u);
  c.order = RemovalOrder::ascending;
  const auto asc = cmd_imbalance_sweep(c);
  EXPECT_NE(desc.files[0], asc.files[0]);
  EXPECT_TRUE(fs::exists(desc.files[0]));
  EXPECT_TRUE(fs::exists(asc.files[0]));
  EXPECT_EQ(desc.files[0].filename(), "imbalance-sweep-desc-42.csv");

  // header plus one row per iteration
  const auto text = workspace::slurp(desc.files[0]);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);

  c.fractions = {0.5};
  EXPECT_EQ(cmd_imbalance_sweep(c).result.records.size(), 1u);
}

TEST(Commands, RebalanceBalancesAndRecordsProvenance) {
  const auto dir = workspace::scratch();
  for (auto a : {Algorithm::smote, Algorithm::g1no}) {
    auto c = config_for("synth:default", dir);
    c.algorithm = a;
    const auto out = cmd_rebalance(c);
    EXPECT_DOUBLE_EQ(imbalance_degree(out.result.balanced), 1.0);
    const Dataset written = load_csv(out.files[0]);
    EXPECT_EQ(written.size(), 2u * 2920);
    const auto meta = read_json(out.files[1]);
    EXPECT_EQ(meta["status"], "complete");
    EXPECT_EQ(meta["rows_after"], 2u * 2920);
  }
}

TEST(Commands, RebalanceCanHoldOutATestPart) {
  const auto dir = workspace::scratch();
  auto c = config_for("synth:default", dir);
  c.split = true;
  const auto out = cmd_rebalance(c);
  ASSERT_TRUE(out.test);
  EXPECT_EQ(out.test->size() + out.result.balanced.size() - out.result.batch.samples.rows(), 4000u);
  EXPECT_EQ(out.files.size(), 3u);
}

TEST(Commands, BalancedInputNeedsNoSamples) {
  const auto dir = workspace::scratch();
  const auto out = cmd_rebalance(config_for("synth:two-cluster", dir));
  EXPECT_EQ(out.result.batch.samples.rows(), 0u);
  EXPECT_EQ(read_json(out.files[1])["accepted_count"], 0);
}

TEST(Commands, BudgetExhaustionWritesOnlyTheSidecar) {
  const auto dir = workspace::scratch();
  auto c = config_for(workspace::write_dataset(dir, "split.csv", workspace::split_minority()).string(), dir);
  c.attempt_factor = 1;
  EXPECT_THROW(cmd_rebalance(c), BudgetExhausted);
  const auto sidecar = read_json(dir / "rebalance-g1no-42.json");
  EXPECT_EQ(sidecar["status"], "budget_exhausted");
  EXPECT_EQ(sidecar["requested"], 160);
  EXPECT_LT(sidecar["accepted_count"].get<int>(), 160);
  EXPECT_FALSE(fs::exists(dir / "rebalance-g1no-42.csv"));
}

TEST(Commands, EvaluateSeparatedData) {
  const auto dir = workspace::scratch();
  auto c = config_for("synth:two-cluster", dir);
  c.epochs = 10;
  const auto out = cmd_evaluate(c);
  EXPECT_GE(out.test.accuracy, 0.95);
  EXPECT_EQ(out.trained.trace.train_loss.size(), 10u);
  for (const char* part : {"metrics", "trace", "roc", "correlation", "pairplot"})
    EXPECT_TRUE(fs::exists(output_file(dir, "evaluate", "g1no", 42, "csv", part))) << part;
  EXPECT_TRUE(fs::exists(output_file(dir, "evaluate", "g1no", 42, "json", "metrics")));
}

TEST(Commands, EvaluateRefusesZeroEpochs) {
  const auto dir = workspace::scratch();
  auto c = config_for("synth:two-cluster", dir);
  c.epochs = 0;
  try {
    cmd_evaluate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("no training performed"), std::string::npos);
  }
}

TEST(Pipeline, CompletesAndIsReproducible) {
  const auto dir = workspace::scratch();
  auto c = config_for("synth:two-cluster", dir);
  c.fractions = {0.3, 0.6};
  const auto a = cmd_pipeline(c);
  EXPECT_TRUE(a.complete);
  const auto manifest = read_json(a.directory / "manifest.json");
  EXPECT_EQ(manifest["status"], "complete");
  ASSERT_EQ(manifest["stages"].size(), 3u);
  for (const auto& s : manifest["stages"]) {
    EXPECT_EQ(s["status"], "complete");
    EXPECT_FALSE(s["files"].empty());
  }

  const auto b = cmd_pipeline(c);
  EXPECT_NE(a.directory, b.directory);
  EXPECT_EQ(read_json(b.directory / "manifest.json")["stages"], manifest["stages"]);
}

TEST(Pipeline, StarvedGeneratorStopsBeforeEvaluation) {
  const auto dir = workspace::scratch();
  auto c = config_for(workspace::write_dataset(dir, "split.csv", workspace::split_minority(7, 300, 60)).string(), dir);
  c.attempt_factor = 1;
  c.fractions = {0.5};
  try {
    cmd_pipeline(c);
    FAIL();
  } catch (const BudgetExhausted&) {
  }
  fs::path run;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) run = e.path();
  ASSERT_FALSE(run.empty());
  const auto m = read_json(run / "manifest.json");
  EXPECT_EQ(m["status"], "failed");
  EXPECT_EQ(m["stage_reached"], "rebalance");
  EXPECT_EQ(m["exit_code"], 3);
  EXPECT_EQ(m["stages"][0]["status"], "complete");
  EXPECT_EQ(m["stages"][1]["status"], "failed");
  EXPECT_EQ(m["stages"][2]["status"], "skipped");
}

TEST(Commands, SynthWritesPresetCsv) {
  const auto dir = workspace::scratch();
  ExperimentConfig c;
  c.out = dir.string();
  const auto path = cmd_synth(c);
  EXPECT_EQ(path.filename(), "synth-default-42.csv");
  const Dataset d = load_csv(path);
  EXPECT_EQ(d.size(), 4000u);
  EXPECT_EQ(d.num_features(), 11u);
  EXPECT_NEAR(imbalance_degree(d), 1080.0 / 2920.0, 1e-12);
}
