#pragma once

// Experiment configuration: a key = value text file, '#' starts a comment.
// Every key except `input` has a default and unknown keys are rejected.
// Command-line flags are applied on top of the file as overrides.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rebal/csv.hpp"
#include "rebal/error.hpp"
#include "rebal/mlp.hpp"
#include "rebal/oversample.hpp"
#include "rebal/undersample.hpp"

namespace rebal {

struct ExperimentConfig {
  /// CSV path, or "synth:<preset>" for a built-in generated dataset.
  std::string input;
  /// Label column name; empty means the last column.
  std::string label_column;
  std::uint64_t seed = 42;
  std::string out = "out";
  bool scale = false;

  /// Empty means no oversampling (evaluate the input as given).
  std::optional<Algorithm> algorithm = Algorithm::g1no;
  std::size_t k = 5;
  double bin_low = -1.0 / 3.0;
  double bin_high = 1.0 / 3.0;
  std::size_t attempt_factor = 1000;
  double filter_fraction = 0.75;

  /// When true, rebalance splits first and oversamples the training part only.
  bool split = false;
  double train_fraction = 0.85;
  double validation_fraction = 0.15;

  RemovalOrder order = RemovalOrder::descending;
  std::vector<double> fractions = default_fractions();
  /// 0 runs the sweep on one holdout split, >= 2 averages over that many folds.
  std::size_t folds = 0;
  double acceptable_ratio = 0.5;
  /// Class names; empty means the minority class.
  std::string target_class;
  std::string positive_class;

  std::size_t epochs = 10;
  std::size_t batch_size = 10;
  double learning_rate = 0.01;
  Activation hidden_activation = Activation::relu;

  static std::vector<double> default_fractions() {
    std::vector<double> f;
    for (int i = 1; i <= 19; ++i) f.push_back(i / 20.0);
    return f;
  }

  MlpConfig mlp() const {
    MlpConfig c;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.learning_rate = learning_rate;
    c.hidden = hidden_activation;
    c.seed = seed;
    return c;
  }

  G1noConfig g1no() const {
    G1noConfig c;
    c.filter_fraction = filter_fraction;
    c.max_attempts_factor = attempt_factor;
    c.bin_thresholds = {bin_low, bin_high};
    return c;
  }

  std::string algorithm_label() const { return algorithm ? algorithm_name(*algorithm) : "none"; }
};

namespace config_detail {

template <typename T>
T parse_unsigned(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  const auto d = csv::parse_number(v);
  if (!d) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return *d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(std::string(csv::trim(item)));
  return parts;
}

}  // namespace config_detail

/// Fractions as a comma list ("0.1,0.5") or an inclusive range "start:stop:step".
inline std::vector<double> parse_fractions(const std::string& v) {
  const std::string key = "fractions";
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::string(csv::trim(item)));
    if (parts.size() != 3) throw ConfigError("fractions range must be start:stop:step");
    const double start = config_detail::parse_real(key, parts[0]);
    const double stop = config_detail::parse_real(key, parts[1]);
    const double step = config_detail::parse_real(key, parts[2]);
    if (!(step > 0.0)) throw ConfigError("fractions step must be positive");
    // Index-based so 0.05:0.95:0.05 yields exactly 19 values.
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  } else {
    for (const auto& p : config_detail::split_list(v)) out.push_back(config_detail::parse_real(key, p));
  }
  detail::check_fractions(out);
  return out;
}

inline std::pair<double, double> parse_bins(const std::string& v) {
  const auto parts = config_detail::split_list(v);
  if (parts.size() != 2) throw ConfigError("bins must be two numbers 'low,high'");
  const double lo = config_detail::parse_real("bins", parts[0]);
  const double hi = config_detail::parse_real("bins", parts[1]);
  if (!(lo >= -1.0 && lo <= hi && hi <= 1.0)) throw ConfigError("bins must satisfy -1 <= low <= high <= 1");
  return {lo, hi};
}

inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using namespace config_detail;
  const std::string& v = value;
  if (key == "input") c.input = v;
  else if (key == "label_column") c.label_column = v;
  else if (key == "seed") c.seed = parse_unsigned<std::uint64_t>(key, v);
  else if (key == "out") c.out = v;
  else if (key == "scale") c.scale = parse_bool(key, v);
  else if (key == "algorithm") c.algorithm = v == "none" ? std::nullopt : std::optional(parse_algorithm(v));
  else if (key == "k") c.k = parse_unsigned<std::size_t>(key, v);
  else if (key == "bins") std::tie(c.bin_low, c.bin_high) = parse_bins(v);
  else if (key == "attempt_factor") c.attempt_factor = parse_unsigned<std::size_t>(key, v);
  else if (key == "filter_fraction") c.filter_fraction = parse_real(key, v);
  else if (key == "split") c.split = parse_bool(key, v);
  else if (key == "train_fraction") c.train_fraction = parse_real(key, v);
  else if (key == "validation_fraction") c.validation_fraction = parse_real(key, v);
  else if (key == "order") c.order = parse_order(v);
  else if (key == "fractions") c.fractions = parse_fractions(v);
  else if (key == "folds") c.folds = parse_unsigned<std::size_t>(key, v);
  else if (key == "acceptable_ratio") c.acceptable_ratio = parse_real(key, v);
  else if (key == "target_class") c.target_class = v;
  else if (key == "positive_class") c.positive_class = v;
  else if (key == "epochs") c.epochs = parse_unsigned<std::size_t>(key, v);
  else if (key == "batch_size") c.batch_size = parse_unsigned<std::size_t>(key, v);
  else if (key == "learning_rate") c.learning_rate = parse_real(key, v);
  else if (key == "hidden_activation") {
    if (v == "relu") c.hidden_activation = Activation::relu;
    else if (v == "sigmoid") c.hidden_activation = Activation::sigmoid;
    else throw ConfigError("hidden_activation must be relu or sigmoid, got '" + v + "'");
  } else throw ConfigError("unknown config key '" + key + "'");
}

/// Checks cross-field constraints; call after all settings are applied.
inline void validate(const ExperimentConfig& c) {
  if (c.input.empty()) throw ConfigError("no input given (set 'input' or pass --input)");
  if (c.k == 0) throw ConfigError("k must be at least 1");
  if (c.attempt_factor == 0) throw ConfigError("attempt_factor must be at least 1");
  if (!(c.filter_fraction > 0.0 && c.filter_fraction < 1.0)) throw ConfigError("filter_fraction must lie in (0, 1)");
  SplitSpec{c.train_fraction, 1.0 - c.train_fraction, c.validation_fraction, c.seed}.validate();
  if (c.folds == 1) throw ConfigError("folds must be 0 (holdout) or at least 2");
  if (!(c.acceptable_ratio >= 0.0 && c.acceptable_ratio <= 1.0)) throw ConfigError("acceptable_ratio must lie in [0, 1]");
  if (c.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

/// Parses key = value lines into `c`. Later lines win.
inline void parse_config(std::istream& in, ExperimentConfig& c, const std::string& source = "config") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body(csv::trim(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string value(csv::trim(body.substr(eq + 1)));
    try {
      apply_setting(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  ExperimentConfig c;
  parse_config(in, c, path);
  return c;
}

inline std::string join_numbers(const std::vector<double>& v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += csv::format_number(v[i]);
  }
  return out;
}

/// The effective configuration as ordered key/value pairs, in a form
/// parse_config reads back to the same settings.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {
      {"input", c.input},
      {"label_column", c.label_column},
      {"seed", std::to_string(c.seed)},
      {"out", c.out},
      {"scale", b(c.scale)},
      {"algorithm", c.algorithm_label()},
      {"k", std::to_string(c.k)},
      {"bins", csv::format_number(c.bin_low) + "," + csv::format_number(c.bin_high)},
      {"attempt_factor", std::to_string(c.attempt_factor)},
      {"filter_fraction", csv::format_number(c.filter_fraction)},
      {"split", b(c.split)},
      {"train_fraction", csv::format_number(c.train_fraction)},
      {"validation_fraction", csv::format_number(c.validation_fraction)},
      {"order", order_name(c.order)},
      {"fractions", join_numbers(c.fractions)},
      {"folds", std::to_string(c.folds)},
      {"acceptable_ratio", csv::format_number(c.acceptable_ratio)},
      {"target_class", c.target_class},
      {"positive_class", c.positive_class},
      {"epochs", std::to_string(c.epochs)},
      {"batch_size", std::to_string(c.batch_size)},
      {"learning_rate", csv::format_number(c.learning_rate)},
      {"hidden_activation", c.hidden_activation == Activation::relu ? "relu" : "sigmoid"},
  };
}

}  // namespace rebal
