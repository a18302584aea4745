#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rebal/error.hpp"

namespace rebal {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Scores of one evaluation run. `auc` and `roc_points` are only present when
/// both classes occur among the labels; aggregated (cross-validated) reports
/// carry the mean AUC but no curve.
struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double accuracy = 0.0;
  std::optional<double> auc;
  ConfusionCounts confusion;
  std::vector<RocPoint> roc_points;
};

/// ROC curve over descending unique score thresholds. Equal scores form one
/// step, so ties contribute a diagonal segment. `positives[i]` is 1 for the
/// positive class and 0 otherwise.
inline RocCurve roc_auc(std::span<const double> scores, std::span<const int> positives) {
  if (scores.size() != positives.size()) throw DataError("score and label counts differ");
  std::size_t pos = 0, neg = 0;
  for (int y : positives) (y ? pos : neg)++;
  if (pos == 0 || neg == 0) throw DataError("ROC needs both classes among the labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (positives[order[i]] ? tp : fp)++;
      ++i;
    }
    RocPoint p{static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)};
    const RocPoint& prev = roc.points.back();
    roc.auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    roc.points.push_back(p);
  }
  return roc;
}

/// Threshold metrics with the conventions precision = 0 when nothing is
/// predicted positive, recall = 0 when there are no positives, F = 0 when
/// precision + recall = 0. Scores >= threshold are predicted positive.
inline MetricsReport classification_metrics(std::span<const double> scores, std::span<const int> positives,
                                            double threshold = 0.5) {
  if (scores.size() != positives.size()) throw DataError("score and label counts differ");
  if (scores.empty()) throw DataError("no predictions to score");
  if (!(threshold > 0.0 && threshold < 1.0)) throw DataError("threshold must lie in (0, 1)");
  MetricsReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = positives[i] != 0;
    if (predicted && actual) ++r.confusion.tp;
    else if (predicted) ++r.confusion.fp;
    else if (actual) ++r.confusion.fn;
    else ++r.confusion.tn;
  }
  const auto& c = r.confusion;
  r.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f_measure = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fn > 0 && c.fp + c.tn > 0) {
    auto roc = roc_auc(scores, positives);
    r.auc = roc.auc;
    r.roc_points = std::move(roc.points);
  }
  return r;
}

/// Arithmetic mean of the scalar metrics; confusion counts are summed. The
/// mean AUC is present only when every report has one.
inline MetricsReport average_metrics(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw DataError("nothing to average");
  MetricsReport mean;
  double auc_sum = 0.0;
  bool all_auc = true;
  for (const auto& r : reports) {
    mean.precision += r.precision;
    mean.recall += r.recall;
    mean.f_measure += r.f_measure;
    mean.accuracy += r.accuracy;
    mean.confusion.tp += r.confusion.tp;
    mean.confusion.fp += r.confusion.fp;
    mean.confusion.tn += r.confusion.tn;
    mean.confusion.fn += r.confusion.fn;
    if (r.auc) auc_sum += *r.auc;
    else all_auc = false;
  }
  const auto k = static_cast<double>(reports.size());
  mean.precision /= k;
  mean.recall /= k;
  mean.f_measure /= k;
  mean.accuracy /= k;
  if (all_auc) mean.auc = auc_sum / k;
  return mean;
}

}  // namespace rebal
