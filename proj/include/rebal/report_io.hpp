#pragma once

// CSV and JSON exports for the report types. Tables are CSV with RFC quoting,
// summaries are JSON.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rebal/correlation.hpp"
#include "rebal/csv.hpp"
#include "rebal/dataset.hpp"
#include "rebal/metrics.hpp"
#include "rebal/mlp.hpp"
#include "rebal/oversample.hpp"
#include "rebal/silhouette.hpp"
#include "rebal/undersample.hpp"

namespace rebal {

using json = nlohmann::ordered_json;

namespace io {

inline std::string num(double v) { return csv::format_number(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }

/// Percentage rounded to two decimals.
inline double percent2(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace io

// ---------------------------------------------------------------- silhouette

/// index, label, coefficient, bin
inline void write_silhouette_csv(std::ostream& os, const SilhouetteReport& r, const std::vector<std::string>& class_names) {
  csv::write_row(os, {"index", "label", "coefficient", "bin"});
  for (std::size_t i = 0; i < r.coefficients.size(); ++i) {
    csv::write_row(os, {io::num(i), class_names[static_cast<std::size_t>(r.labels[i])], io::num(r.coefficients[i]),
                        bin_name(r.bins.classify(r.coefficients[i]))});
  }
}

inline json silhouette_summary_json(const SilhouetteReport& r, const std::vector<std::string>& class_names) {
  json j;
  j["samples"] = r.coefficients.size();
  j["thresholds"] = {r.bins.low, r.bins.high};
  j["bins"] = {
      {"near_-1", {{"count", r.bins.near_negative}, {"percent", io::percent2(r.bins.fraction_negative())}}},
      {"near_0", {{"count", r.bins.near_zero}, {"percent", io::percent2(r.bins.fraction_zero())}}},
      {"near_+1", {{"count", r.bins.near_positive}, {"percent", io::percent2(r.bins.fraction_positive())}}},
  };
  json classes = json::object();
  for (std::size_t c = 0; c < class_names.size(); ++c)
    classes[class_names[c]] = {{"count", r.per_class_count[c]}, {"mean_silhouette", r.per_class_mean[c]}};
  j["classes"] = classes;
  return j;
}

// ---------------------------------------------------------------- metrics

inline json metrics_json(const MetricsReport& m) {
  json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f_measure"] = m.f_measure;
  j["accuracy"] = m.accuracy;
  j["auc"] = m.auc ? json(*m.auc) : json(nullptr);
  j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}};
  json roc = json::array();
  for (const auto& p : m.roc_points) roc.push_back({p.fpr, p.tpr});
  j["roc_points"] = roc;
  return j;
}

/// One row per named report: set, precision, recall, f_measure, accuracy, auc, tp, fp, tn, fn.
inline void write_metrics_csv(std::ostream& os, const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  csv::write_row(os, {"set", "precision", "recall", "f_measure", "accuracy", "auc", "tp", "fp", "tn", "fn"});
  for (const auto& [name, m] : reports) {
    csv::write_row(os, {name, io::num(m.precision), io::num(m.recall), io::num(m.f_measure), io::num(m.accuracy),
                        m.auc ? io::num(*m.auc) : std::string{}, io::num(m.confusion.tp), io::num(m.confusion.fp),
                        io::num(m.confusion.tn), io::num(m.confusion.fn)});
  }
}

inline void write_roc_csv(std::ostream& os, const MetricsReport& m) {
  csv::write_row(os, {"fpr", "tpr"});
  for (const auto& p : m.roc_points) csv::write_row(os, {io::num(p.fpr), io::num(p.tpr)});
}

// ---------------------------------------------------------------- training trace

/// epoch, tlc, vlc
inline void write_trace_csv(std::ostream& os, const TrainingTrace& t) {
  csv::write_row(os, {"epoch", "tlc", "vlc"});
  for (std::size_t e = 0; e < t.train_loss.size(); ++e)
    csv::write_row(os, {io::num(e + 1), io::num(t.train_loss[e]), io::num(t.validation_loss[e])});
}

// ---------------------------------------------------------------- correlation

inline void write_correlation_csv(std::ostream& os, const CorrelationMatrix& c) {
  std::vector<std::string> row{"feature"};
  row.insert(row.end(), c.names.begin(), c.names.end());
  csv::write_row(os, row);
  for (std::size_t i = 0; i < c.size(); ++i) {
    row.assign(1, c.names[i]);
    for (std::size_t j = 0; j < c.size(); ++j) row.push_back(io::num(c(i, j)));
    csv::write_row(os, row);
  }
}

inline json correlation_json(const CorrelationMatrix& c) {
  json j;
  j["features"] = c.names;
  json rows = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    json r = json::array();
    for (std::size_t j2 = 0; j2 < c.size(); ++j2) r.push_back(c(i, j2));
    rows.push_back(r);
  }
  j["matrix"] = rows;
  json flagged = json::array();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.zero_variance[i]) flagged.push_back(c.names[i]);
  j["zero_variance"] = flagged;
  j["mean_abs_off_diagonal"] = mean_abs_off_diagonal(c);
  return j;
}

/// Long format for pair plots: one row per sample and feature pair (x < y).
inline void write_pairplot_csv(std::ostream& os, const Dataset& d) {
  csv::write_row(os, {"feature_x", "feature_y", "value_x", "value_y", "class"});
  for (std::size_t a = 0; a < d.num_features(); ++a) {
    for (std::size_t b = a + 1; b < d.num_features(); ++b) {
      for (std::size_t i = 0; i < d.size(); ++i) {
        csv::write_row(os, {d.feature_names[a], d.feature_names[b], io::num(d.samples(i, a)), io::num(d.samples(i, b)),
                            d.class_names[static_cast<std::size_t>(d.labels[i])]});
      }
    }
  }
}

// ---------------------------------------------------------------- sweep

/// iteration, fraction, removed, pct_other, pct_target, imbalance_degree,
/// precision, recall, f_measure, accuracy, auc, acceptable, idft
inline void write_sweep_csv(std::ostream& os, const SweepResult& s) {
  csv::write_row(os, {"iteration", "fraction", "removed", "pct_other", "pct_target", "imbalance_degree", "precision",
                      "recall", "f_measure", "accuracy", "auc", "acceptable", "idft"});
  auto row = [&](std::size_t it, double fraction, std::size_t removed, double po, double pt, double id,
                 const MetricsReport& m, bool ok, bool idft) {
    csv::write_row(os, {io::num(it), io::num(fraction), io::num(removed), io::num(po), io::num(pt), io::num(id),
                        io::num(m.precision), io::num(m.recall), io::num(m.f_measure), io::num(m.accuracy),
                        m.auc ? io::num(*m.auc) : std::string{}, ok ? "1" : "0", idft ? "IDft" : ""});
  };
  for (const auto& r : s.records)
    row(r.iteration, r.fraction, r.removed, r.pct_other, r.pct_target, r.imbalance_degree, r.metrics, r.acceptable,
        s.idft_iteration && *s.idft_iteration == r.iteration);
}

inline json sweep_json(const SweepResult& s, const std::vector<std::string>& class_names) {
  json j;
  j["target_class"] = class_names[static_cast<std::size_t>(s.target_class)];
  j["order"] = order_name(s.order);
  j["baseline"] = metrics_json(s.baseline);
  json recs = json::array();
  for (const auto& r : s.records) {
    json m = metrics_json(r.metrics);
    m.erase("roc_points");
    recs.push_back({{"iteration", r.iteration},
                    {"fraction", r.fraction},
                    {"removed", r.removed},
                    {"pct_other", r.pct_other},
                    {"pct_target", r.pct_target},
                    {"imbalance_degree", r.imbalance_degree},
                    {"acceptable", r.acceptable},
                    {"metrics", m}});
  }
  j["records"] = recs;
  j["idft_iteration"] = s.idft_iteration ? json(*s.idft_iteration) : json(nullptr);
  j["idft"] = s.idft ? json(*s.idft) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------- synthetic batch

/// Feature columns, label, algorithm, seed.
inline void write_batch_csv(std::ostream& os, const SyntheticBatch& b, const std::vector<std::string>& feature_names,
                            const std::string& label) {
  std::vector<std::string> row = feature_names;
  row.insert(row.end(), {"label", "algorithm", "seed"});
  csv::write_row(os, row);
  for (std::size_t i = 0; i < b.samples.rows(); ++i) {
    row.clear();
    for (double v : b.samples.row(i)) row.push_back(io::num(v));
    row.insert(row.end(), {label, algorithm_name(b.algorithm), std::to_string(b.seed)});
    csv::write_row(os, row);
  }
}

inline json batch_json(const SyntheticBatch& b) {
  json j;
  j["algorithm"] = algorithm_name(b.algorithm);
  j["seed"] = b.seed;
  j["accepted_count"] = b.accepted_count;
  j["rejected_by_1nn"] = b.rejected_by_1nn;
  j["rejected_duplicate"] = b.rejected_duplicate;
  j["attempts"] = b.attempts;
  if (b.generator_stats) {
    j["generator"] = {{"means", b.generator_stats->means},
                      {"std_devs", b.generator_stats->std_devs},
                      {"weighted", b.generator_stats->weighted}};
  }
  if (!b.filter_reference.empty()) j["filter_reference_size"] = b.filter_reference.size();
  if (b.filter_validation_accuracy) j["filter_validation_accuracy"] = *b.filter_validation_accuracy;
  return j;
}

// ---------------------------------------------------------------- helpers

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  io::write_text(path, os.str());
}

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
inline std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xF];
  return out;
}

}  // namespace rebal
