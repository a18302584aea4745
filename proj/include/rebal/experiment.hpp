#pragma once

// The experiment commands behind the CLI. Each command reads its input,
// writes its artifacts under config.out and returns the in-memory results.

#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rebal/config.hpp"
#include "rebal/correlation.hpp"
#include "rebal/csv.hpp"
#include "rebal/dataset.hpp"
#include "rebal/metrics.hpp"
#include "rebal/mlp.hpp"
#include "rebal/oversample.hpp"
#include "rebal/report_io.hpp"
#include "rebal/silhouette.hpp"
#include "rebal/split.hpp"
#include "rebal/synthetic.hpp"
#include "rebal/undersample.hpp"

#ifndef REBAL_VERSION
#define REBAL_VERSION "0.0.0"
#endif

namespace rebal {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = REBAL_VERSION;

// Seed streams, so each stage draws from its own generator.
inline std::uint64_t split_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 51); }
inline std::uint64_t rebalance_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 52); }
inline std::uint64_t sweep_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 53); }
inline std::uint64_t synth_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 54); }

inline const std::vector<std::string>& synthetic_presets() {
  static const std::vector<std::string> names{"default", "two-cluster"};
  return names;
}

/// Built-in datasets. "default": 11 features, 1080 minority in two opposed
/// components, 2920 majority (ID ~ 0.37). "two-cluster": two well separated
/// balanced Gaussians.
inline Dataset synthetic_preset(const std::string& name, std::uint64_t seed) {
  if (name == "default") return make_synthetic_dataset(opposed_minority_spec(1080, 2920, 11, 1.5, 3.0, 0.5, seed));
  if (name == "two-cluster") return make_synthetic_dataset(two_class_spec(500, 500, 11, 4.0, 0.5, seed));
  throw ConfigError("unknown synthetic preset '" + name + "'");
}

inline Dataset load_input(const ExperimentConfig& c) {
  if (c.input.empty()) throw ConfigError("no input given (set 'input' or pass --input)");
  Dataset d;
  if (c.input.rfind("synth:", 0) == 0) {
    d = synthetic_preset(c.input.substr(6), synth_seed(c));
  } else {
    d = load_csv(c.input, c.label_column);
  }
  if (c.scale) d.samples = MinMaxScaler::fit(d.samples).transform(d.samples);
  return d;
}

/// Class tag by name, or the minority class when `name` is empty.
inline int resolve_class(const Dataset& d, const std::string& name) {
  if (name.empty()) return class_counts(d).minority_label;
  const int tag = d.label_of(name);
  if (tag < 0) throw ConfigError("class '" + name + "' does not occur in the data");
  return tag;
}

/// <out>/<command>-<tag>-<seed>[-<part>].<ext>
inline fs::path output_file(const fs::path& dir, const std::string& command, const std::string& tag,
                            std::uint64_t seed, const std::string& ext, const std::string& part = "") {
  std::string name = command + "-" + tag + "-" + std::to_string(seed);
  if (!part.empty()) name += "-" + part;
  return dir / (name + "." + ext);
}

inline fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

// ---------------------------------------------------------------- evaluation helpers

inline MetricsReport score_model(const MlpModel& model, const Dataset& d, int positive) {
  const auto scores = mlp_predict(model, d.samples);
  std::vector<int> truth(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) truth[i] = d.labels[i] == positive ? 1 : 0;
  return classification_metrics(scores, truth);
}

/// Sweep evaluator: train on the reduced set and score on `validation` plus
/// the samples removed at this step.
inline SweepEvaluator holdout_sweep_evaluator(const Dataset& validation, const MlpConfig& mlp, int positive_class) {
  return [validation, mlp, positive_class](const Dataset& reduced, const Dataset& removed, std::size_t) {
    const Dataset val = removed.size() ? concat(validation, removed) : validation;
    const int pos = val.label_of(reduced.class_names[static_cast<std::size_t>(positive_class)]);
    const auto trained = mlp_train(reduced, val, mlp, positive_class);
    return score_model(trained.model, val, pos);
  };
}

inline FoldSweepEvaluator fold_sweep_evaluator(const MlpConfig& mlp, int positive_class) {
  return [mlp, positive_class](const Dataset& reduced, const Dataset& removed, const Dataset& held_out, std::size_t) {
    const Dataset val = removed.size() ? concat(held_out, removed) : held_out;
    const int pos = val.label_of(reduced.class_names[static_cast<std::size_t>(positive_class)]);
    const auto trained = mlp_train(reduced, val, mlp, positive_class);
    return score_model(trained.model, val, pos);
  };
}

inline SplitSpec split_spec(const ExperimentConfig& c) {
  return {c.train_fraction, 1.0 - c.train_fraction, c.validation_fraction, split_seed(c)};
}

inline RebalanceConfig rebalance_config(const ExperimentConfig& c) {
  if (!c.algorithm) throw ConfigError("an oversampling algorithm is required (smote, adasyn, g1no or g1no-gourmet)");
  RebalanceConfig r;
  r.algorithm = *c.algorithm;
  r.k = c.k;
  r.seed = rebalance_seed(c);
  r.g1no = c.g1no();
  return r;
}

// ---------------------------------------------------------------- silhouette

struct SilhouetteOutput {
  SilhouetteReport report;
  std::vector<fs::path> files;
};

inline SilhouetteOutput cmd_silhouette(const ExperimentConfig& c) {
  const Dataset d = load_input(c);
  const fs::path dir = prepare_out(c.out);
  SilhouetteOutput out{silhouette_report(d, {c.bin_low, c.bin_high}), {}};
  const auto csv_path = output_file(dir, "silhouette", "none", c.seed, "csv");
  const auto json_path = output_file(dir, "silhouette", "none", c.seed, "json");
  write_file(csv_path, [&](std::ostream& os) { write_silhouette_csv(os, out.report, d.class_names); });
  io::write_json(json_path, silhouette_summary_json(out.report, d.class_names));
  out.files = {csv_path, json_path};
  return out;
}

// ---------------------------------------------------------------- imbalance sweep

struct SweepOutput {
  SweepResult result;
  std::vector<std::string> class_names;
  std::vector<fs::path> files;
};

/// The sweep on an already loaded dataset. Holdout mode sweeps the learning
/// part of the standard split and scores on its validation part.
inline SweepResult run_sweep(const Dataset& d, const ExperimentConfig& c) {
  const int target = resolve_class(d, c.target_class);
  const int positive = c.positive_class.empty() ? target : resolve_class(d, c.positive_class);
  const SweepPlan plan{target, c.order, sweep_seed(c)};
  const Acceptability ok = relative_f_measure(c.acceptable_ratio);
  if (c.folds >= 2) {
    return cross_validated_sweep(d, c.folds, c.fractions, plan, fold_sweep_evaluator(c.mlp(), positive), ok,
                                 {c.bin_low, c.bin_high})
        .averaged;
  }
  const SplitParts parts = split(d, split_spec(c));
  return idft_sweep(parts.train, c.fractions, plan, silhouette_report(parts.train, {c.bin_low, c.bin_high}),
                    holdout_sweep_evaluator(parts.validation, c.mlp(), positive), ok);
}

inline void write_sweep_files(const SweepResult& r, const std::vector<std::string>& class_names,
                              const fs::path& csv_path, const fs::path& json_path) {
  write_file(csv_path, [&](std::ostream& os) { write_sweep_csv(os, r); });
  io::write_json(json_path, sweep_json(r, class_names));
}

inline SweepOutput cmd_imbalance_sweep(const ExperimentConfig& c) {
  const Dataset d = load_input(c);
  const fs::path dir = prepare_out(c.out);
  SweepOutput out{run_sweep(d, c), d.class_names, {}};
  const auto csv_path = output_file(dir, "imbalance-sweep", order_name(c.order), c.seed, "csv");
  const auto json_path = output_file(dir, "imbalance-sweep", order_name(c.order), c.seed, "json");
  write_sweep_files(out.result, d.class_names, csv_path, json_path);
  out.files = {csv_path, json_path};
  return out;
}

// ---------------------------------------------------------------- rebalance

struct RebalanceOutput {
  RebalanceResult result;
  /// Held-out part when the config asks to split first.
  std::optional<Dataset> test;
  std::vector<fs::path> files;
};

inline json provenance_json(const SyntheticBatch& b, const Dataset& before, const Dataset& after,
                            const std::string& status) {
  json j = batch_json(b);
  j["status"] = status;
  j["rows_before"] = before.size();
  j["rows_after"] = after.size();
  j["imbalance_degree_before"] = imbalance_degree(before);
  j["imbalance_degree_after"] = imbalance_degree(after);
  return j;
}

/// Oversamples `train`; on budget exhaustion writes the counters to
/// `sidecar` and rethrows, withholding the partial data.
inline RebalanceResult rebalance_with_sidecar(const Dataset& train, const ExperimentConfig& c, const fs::path& sidecar) {
  try {
    return rebalance(train, rebalance_config(c));
  } catch (const BudgetExhausted& e) {
    json j = batch_json(e.partial());
    j["status"] = "budget_exhausted";
    j["requested"] = e.requested();
    j["error"] = e.what();
    io::write_json(sidecar, j);
    throw;
  }
}

inline RebalanceOutput cmd_rebalance(const ExperimentConfig& c) {
  const Dataset d = load_input(c);
  const fs::path dir = prepare_out(c.out);
  const std::string tag = c.algorithm_label();
  const auto data_path = output_file(dir, "rebalance", tag, c.seed, "csv");
  const auto json_path = output_file(dir, "rebalance", tag, c.seed, "json");

  Dataset train = d;
  std::optional<Dataset> test;
  if (c.split) {
    // Split first so the held-out part never sees synthetic rows.
    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto [test_idx, train_idx] = stratified_partition(d, all, 1.0 - c.train_fraction, derive_seed(split_seed(c), 1));
    train = subset(d, train_idx);
    test = subset(d, test_idx);
  }

  RebalanceOutput out{rebalance_with_sidecar(train, c, json_path), std::move(test), {}};
  save_csv(data_path, out.result.balanced);
  io::write_json(json_path, provenance_json(out.result.batch, train, out.result.balanced, "complete"));
  out.files = {data_path, json_path};
  if (out.test) {
    const auto test_path = output_file(dir, "rebalance", tag, c.seed, "csv", "test");
    save_csv(test_path, *out.test);
    out.files.push_back(test_path);
  }
  return out;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOutput {
  TrainedMlp trained;
  MetricsReport test;
  MetricsReport validation;
  CorrelationMatrix correlation;
  /// The set the model was trained on (after oversampling, if any).
  Dataset training_set;
  std::vector<fs::path> files;
};

/// Train on `learn`, score on `validation` and `test`, write the artifacts.
inline EvaluateOutput evaluate_parts(const Dataset& learn, const Dataset& validation, const Dataset& test, int positive,
                                     const ExperimentConfig& c, const fs::path& dir, const std::string& command) {
  EvaluateOutput out;
  out.training_set = learn;
  out.trained = mlp_train(learn, validation, c.mlp(), positive);
  const std::string& pos_name = learn.class_names[static_cast<std::size_t>(positive)];
  out.test = score_model(out.trained.model, test, test.label_of(pos_name));
  out.validation = score_model(out.trained.model, validation, validation.label_of(pos_name));
  out.correlation = pearson_matrix(learn);

  const std::string tag = c.algorithm_label();
  auto file = [&](const std::string& part, const std::string& ext) {
    return output_file(dir, command, tag, c.seed, ext, part);
  };
  const auto metrics_csv = file("metrics", "csv");
  const auto metrics_json_path = file("metrics", "json");
  const auto trace_csv = file("trace", "csv");
  const auto roc_csv = file("roc", "csv");
  const auto corr_csv = file("correlation", "csv");
  const auto corr_json = file("correlation", "json");
  const auto pair_csv = file("pairplot", "csv");

  write_file(metrics_csv, [&](std::ostream& os) {
    write_metrics_csv(os, {{"test", out.test}, {"validation", out.validation}});
  });
  json mj;
  mj["positive_class"] = pos_name;
  mj["algorithm"] = tag;
  mj["seed"] = c.seed;
  mj["training_rows"] = learn.size();
  mj["test"] = metrics_json(out.test);
  mj["validation"] = metrics_json(out.validation);
  io::write_json(metrics_json_path, mj);
  write_file(trace_csv, [&](std::ostream& os) { write_trace_csv(os, out.trained.trace); });
  write_file(roc_csv, [&](std::ostream& os) { write_roc_csv(os, out.test); });
  write_file(corr_csv, [&](std::ostream& os) { write_correlation_csv(os, out.correlation); });
  io::write_json(corr_json, correlation_json(out.correlation));
  write_file(pair_csv, [&](std::ostream& os) { write_pairplot_csv(os, learn); });
  out.files = {metrics_csv, metrics_json_path, trace_csv, roc_csv, corr_csv, corr_json, pair_csv};
  return out;
}

/// Splits the input into learning/validation/test parts, oversamples the
/// learning part with the configured algorithm (if any) and trains the MLP.
inline EvaluateOutput cmd_evaluate(const ExperimentConfig& c) {
  if (c.epochs == 0) throw ConfigError("no training performed: epochs must be at least 1");
  const Dataset d = load_input(c);
  const fs::path dir = prepare_out(c.out);
  const int positive = resolve_class(d, c.positive_class);
  const SplitParts parts = split(d, split_spec(c));
  Dataset learn = parts.train;
  if (c.algorithm) {
    const auto sidecar = output_file(dir, "evaluate", c.algorithm_label(), c.seed, "json", "batch");
    learn = rebalance_with_sidecar(parts.train, c, sidecar).balanced;
  }
  return evaluate_parts(learn, parts.validation, parts.test, positive, c, dir, "evaluate");
}

// ---------------------------------------------------------------- pipeline

struct PipelineOutput {
  fs::path directory;
  json manifest;
  std::string stage_reached;
  bool complete = false;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

inline fs::path fresh_directory(const fs::path& parent, const std::string& stem) {
  fs::path dir = parent / stem;
  for (int n = 2; fs::exists(dir); ++n) dir = parent / (stem + "-" + std::to_string(n));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

namespace detail {

inline json file_entries(const std::vector<fs::path>& files) {
  json arr = json::array();
  for (const auto& f : files) arr.push_back({{"file", f.filename().string()}, {"checksum", file_checksum(f)}});
  return arr;
}

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BudgetExhausted*>(&e)) return 3;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e)) return 1;
  if (dynamic_cast<const SweepError*>(&e) || dynamic_cast<const DataError*>(&e) || dynamic_cast<const Error*>(&e))
    return 2;
  return 2;
}

}  // namespace detail

/// Imbalance (silhouette-ordered sweep on the learning part), rebalance the
/// learning part as reduced at the IDft step, then evaluate. Everything goes
/// to a fresh timestamped directory with a JSON manifest. A failing stage
/// stops the run; the manifest is written first, then the error is rethrown.
inline PipelineOutput cmd_pipeline(const ExperimentConfig& c) {
  validate(c);
  const std::string tag = c.algorithm_label();
  PipelineOutput out;
  out.directory = fresh_directory(prepare_out(c.out), "pipeline-" + tag + "-" + std::to_string(c.seed) + "-" + utc_timestamp());
  const fs::path& dir = out.directory;

  json& m = out.manifest;
  m["tool"] = "rebal";
  m["version"] = kVersion;
  m["created"] = utc_timestamp();
  json cfg = json::object();
  for (const auto& [k, v] : config_entries(c)) cfg[k] = v;
  m["config"] = cfg;
  m["seeds"] = {{"seed", c.seed},
                {"split", split_seed(c)},
                {"sweep", sweep_seed(c)},
                {"rebalance", rebalance_seed(c)},
                {"mlp", c.seed}};
  m["stages"] = json::array();
  auto stage = [&](const std::string& name, const std::string& status, const std::vector<fs::path>& files = {},
                   const std::string& error = "") {
    json s{{"name", name}, {"status", status}, {"files", detail::file_entries(files)}};
    if (!error.empty()) s["error"] = error;
    m["stages"].push_back(s);
  };
  auto finish = [&] {
    m["stage_reached"] = out.stage_reached;
    m["status"] = out.complete ? "complete" : "failed";
    io::write_json(dir / "manifest.json", m);
  };

  const std::vector<std::string> names{"imbalance", "rebalance", "evaluate"};
  std::size_t current = 0;
  try {
    ExperimentConfig cc = c;
    cc.out = dir.string();
    const Dataset d = load_input(cc);
    const int target = resolve_class(d, cc.target_class);
    const SplitParts parts = split(d, split_spec(cc));

    // Stage 1: progressive imbalance of the learning part.
    out.stage_reached = names[0];
    const SweepPlan plan{target, cc.order, sweep_seed(cc)};
    const SilhouetteReport report = silhouette_report(parts.train, {cc.bin_low, cc.bin_high});
    const SweepResult sweep = idft_sweep(parts.train, cc.fractions, plan, report,
                                         holdout_sweep_evaluator(parts.validation, cc.mlp(), target),
                                         relative_f_measure(cc.acceptable_ratio));
    const std::size_t step = sweep.idft_iteration.value_or(cc.fractions.size());
    const RemovalResult removal = remove_fraction(
        parts.train, {target, cc.fractions[step - 1], cc.order, derive_seed(plan.seed, step)}, report);
    const Dataset validation = concat(parts.validation, removal.removed);
    const auto sweep_csv = output_file(dir, "imbalance-sweep", order_name(cc.order), cc.seed, "csv");
    const auto sweep_json_path = output_file(dir, "imbalance-sweep", order_name(cc.order), cc.seed, "json");
    const auto imbalanced_csv = output_file(dir, "imbalance-sweep", order_name(cc.order), cc.seed, "csv", "learn");
    write_sweep_files(sweep, d.class_names, sweep_csv, sweep_json_path);
    save_csv(imbalanced_csv, removal.reduced);
    stage("imbalance", "complete", {sweep_csv, sweep_json_path, imbalanced_csv});
    m["imbalance"] = {{"idft_iteration", sweep.idft_iteration ? json(*sweep.idft_iteration) : json(nullptr)},
                      {"idft", sweep.idft ? json(*sweep.idft) : json(nullptr)},
                      {"reduced_at_iteration", step},
                      {"imbalance_degree", imbalance_degree(removal.reduced)}};

    // Stage 2: oversample the reduced learning part.
    current = 1;
    out.stage_reached = names[1];
    const auto balanced_csv = output_file(dir, "rebalance", tag, cc.seed, "csv");
    const auto batch_json_path = output_file(dir, "rebalance", tag, cc.seed, "json");
    const RebalanceResult rebalanced = rebalance_with_sidecar(removal.reduced, cc, batch_json_path);
    save_csv(balanced_csv, rebalanced.balanced);
    io::write_json(batch_json_path, provenance_json(rebalanced.batch, removal.reduced, rebalanced.balanced, "complete"));
    stage("rebalance", "complete", {balanced_csv, batch_json_path});

    // Stage 3: train and score.
    current = 2;
    out.stage_reached = names[2];
    const int positive = rebalanced.balanced.label_of(d.class_names[static_cast<std::size_t>(target)]);
    const EvaluateOutput ev =
        evaluate_parts(rebalanced.balanced, validation, parts.test, positive, cc, dir, "evaluate");
    stage("evaluate", "complete", ev.files);
    out.complete = true;
    finish();
  } catch (const std::exception& e) {
    if (out.stage_reached.empty()) out.stage_reached = names[0];
    std::vector<fs::path> partial;
    if (current == 1) {
      const auto sidecar = output_file(dir, "rebalance", tag, c.seed, "json");
      if (fs::exists(sidecar)) partial.push_back(sidecar);
    }
    stage(names[current], "failed", partial, e.what());
    for (std::size_t s = current + 1; s < names.size(); ++s) stage(names[s], "skipped");
    m["exit_code"] = detail::exit_code_for(e);
    finish();
    throw;
  }
  return out;
}

// ---------------------------------------------------------------- synth

/// Writes a built-in dataset ("synth:<preset>", default preset when input is empty).
inline fs::path cmd_synth(const ExperimentConfig& c) {
  ExperimentConfig cc = c;
  if (cc.input.empty()) cc.input = "synth:default";
  if (cc.input.rfind("synth:", 0) != 0) throw ConfigError("synth expects a preset name, e.g. synth:default");
  const Dataset d = load_input(cc);
  const auto path = output_file(prepare_out(cc.out), "synth", cc.input.substr(6), cc.seed, "csv");
  save_csv(path, d);
  return path;
}

}  // namespace rebal
