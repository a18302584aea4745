// rebal: command line front end for the experiment commands.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 oversampling budget exhausted.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rebal/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  auto key = [&f](const char* name) {
    return [&f, name](const std::string& v) { f.overrides.emplace_back(name, v); };
  };
  cmd->add_option("--config", f.config_path, "key = value configuration file");
  cmd->add_option_function<std::string>("--input", key("input"), "input CSV or synth:<preset>");
  cmd->add_option_function<std::string>("--seed", key("seed"), "master seed");
  cmd->add_option_function<std::string>("--algorithm", key("algorithm"), "smote, adasyn, g1no, g1no-gourmet or none");
  cmd->add_option_function<std::string>("--out", key("out"), "output directory");
  cmd->add_option_function<std::string>("--order", key("order"), "silhouette removal order")
      ->check(CLI::IsMember({"asc", "desc", "random"}));
  cmd->add_option_function<std::string>("--fractions", key("fractions"), "comma list or start:stop:step");
  cmd->add_option_function<std::string>("--k", key("k"), "neighbors for SMOTE and ADASYN");
  cmd->add_option_function<std::string>("--bins", key("bins"), "silhouette bin thresholds 'low,high'");
  cmd->add_option("--set", f.sets, "any config key as key=value (repeatable)");
}

rebal::ExperimentConfig build_config(const CommonFlags& f, bool require_input = true) {
  rebal::ExperimentConfig c = f.config_path.empty() ? rebal::ExperimentConfig{} : rebal::load_config(f.config_path);
  for (const auto& [k, v] : f.overrides) rebal::apply_setting(c, k, v);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rebal::ConfigError("--set expects key=value, got '" + kv + "'");
    rebal::apply_setting(c, std::string(rebal::csv::trim(kv.substr(0, eq))),
                         std::string(rebal::csv::trim(kv.substr(eq + 1))));
  }
  if (require_input || !c.input.empty()) {
    rebal::validate(c);
  }
  return c;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Silhouette-driven undersampling, G1No/SMOTE/ADASYN oversampling and MLP evaluation"};
  app.set_version_flag("--version", std::string(rebal::kVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  auto* silhouette = app.add_subcommand("silhouette", "per-sample silhouette coefficients and bin summary");
  auto* sweep = app.add_subcommand("imbalance-sweep", "progressive silhouette-ordered removal and IDft");
  auto* rebalance = app.add_subcommand("rebalance", "oversample the minority class to a 1:1 ratio");
  auto* evaluate = app.add_subcommand("evaluate", "train the MLP and write metrics, curves and correlations");
  auto* pipeline = app.add_subcommand("pipeline", "imbalance, rebalance and evaluate in one run");
  auto* synth = app.add_subcommand("synth", "write a built-in synthetic dataset");
  for (auto* cmd : {silhouette, sweep, rebalance, evaluate, pipeline, synth}) add_common(cmd, flags);
  std::string preset;
  synth->add_option("--preset", preset, "dataset preset")->check(CLI::IsMember(rebal::synthetic_presets()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      if (!preset.empty()) flags.overrides.emplace_back("input", "synth:" + preset);
      std::cout << rebal::cmd_synth(build_config(flags, false)).string() << '\n';
      return 0;
    }
    const rebal::ExperimentConfig config = build_config(flags);
    if (*silhouette) {
      const auto out = rebal::cmd_silhouette(config);
      const auto& b = out.report.bins;
      std::cout << "near -1: " << b.near_negative << "  near 0: " << b.near_zero << "  near +1: " << b.near_positive
                << '\n';
      report(out.files);
    } else if (*sweep) {
      const auto out = rebal::cmd_imbalance_sweep(config);
      if (out.result.idft)
        std::cout << "IDft " << *out.result.idft << " at iteration " << *out.result.idft_iteration << '\n';
      else
        std::cout << "no iteration fell below the acceptability threshold\n";
      report(out.files);
    } else if (*rebalance) {
      const auto out = rebal::cmd_rebalance(config);
      std::cout << "generated " << out.result.batch.accepted_count << " samples\n";
      report(out.files);
    } else if (*evaluate) {
      const auto out = rebal::cmd_evaluate(config);
      std::cout << "test accuracy " << out.test.accuracy << "  F-measure " << out.test.f_measure << '\n';
      report(out.files);
    } else if (*pipeline) {
      const auto out = rebal::cmd_pipeline(config);
      std::cout << out.directory.string() << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "rebal: error: " << e.what() << '\n';
    return rebal::detail::exit_code_for(e);
  }
}
