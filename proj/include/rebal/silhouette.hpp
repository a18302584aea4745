#pragma once

// Silhouette coefficients over the supervised class partition.
//
// For a sample t in class C_i:
//   a(t) = mean distance to the other members of C_i
//   b(t) = smallest mean distance to the members of another class
//   s(t) = (b - a) / max(a, b), or 0 when C_i = {t}

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/neighbors.hpp"

namespace rebal {

inline double intra_dissimilarity(const Dataset& d, std::size_t t) {
  if (t >= d.size()) throw DataError("sample index out of range");
  const int own = d.labels[t];
  double sum = 0.0;
  std::size_t peers = 0;
  for (std::size_t u = 0; u < d.size(); ++u) {
    if (u == t || d.labels[u] != own) continue;
    sum += euclidean_distance(d.row(t), d.row(u));
    ++peers;
  }
  if (peers == 0) throw DataError("intra-class dissimilarity undefined for a singleton class");
  return sum / static_cast<double>(peers);
}

inline double inter_dissimilarity(const Dataset& d, std::size_t t) {
  if (t >= d.size()) throw DataError("sample index out of range");
  const int own = d.labels[t];
  std::vector<double> sums(d.class_names.size(), 0.0);
  std::vector<std::size_t> counts(d.class_names.size(), 0);
  for (std::size_t u = 0; u < d.size(); ++u) {
    const int c = d.labels[u];
    if (c == own) continue;
    sums[static_cast<std::size_t>(c)] += euclidean_distance(d.row(t), d.row(u));
    ++counts[static_cast<std::size_t>(c)];
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < sums.size(); ++c)
    if (counts[c] > 0) best = std::min(best, sums[c] / static_cast<double>(counts[c]));
  if (!std::isfinite(best)) throw DataError("inter-class dissimilarity needs another non-empty class");
  return best;
}

namespace detail {

inline double silhouette_from(double a, double b) {
  const double denom = std::max(a, b);
  if (denom == 0.0) return 0.0;  // a = b = 0: cross-class duplicate, on the boundary
  return std::clamp((b - a) / denom, -1.0, 1.0);
}

inline void require_two_classes(const Dataset& d) {
  if (d.class_names.size() < 2 || d.count(0) == 0 || d.count(1) == 0)
    throw DataError("silhouette needs two non-empty classes");
}

}  // namespace detail

inline double silhouette_coefficient(const Dataset& d, std::size_t t) {
  detail::require_two_classes(d);
  if (t >= d.size()) throw DataError("sample index out of range");
  if (d.count(d.labels[t]) == 1) return 0.0;
  return detail::silhouette_from(intra_dissimilarity(d, t), inter_dissimilarity(d, t));
}

/// Every s(t) in one O(m^2) pass over the sample pairs.
inline std::vector<double> silhouette_coefficients(const Dataset& d) {
  detail::require_two_classes(d);
  const std::size_t m = d.size();
  const std::size_t k = d.class_names.size();
  std::vector<double> sums(m * k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ci = static_cast<std::size_t>(d.labels[i]);
    const auto xi = d.row(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double dist = euclidean_distance(xi, d.row(j));
      sums[i * k + static_cast<std::size_t>(d.labels[j])] += dist;
      sums[j * k + ci] += dist;
    }
  }
  std::vector<std::size_t> counts(k, 0);
  for (int l : d.labels) ++counts[static_cast<std::size_t>(l)];

  std::vector<double> s(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ci = static_cast<std::size_t>(d.labels[i]);
    if (counts[ci] == 1) continue;
    const double a = sums[i * k + ci] / static_cast<double>(counts[ci] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != ci && counts[c] > 0) b = std::min(b, sums[i * k + c] / static_cast<double>(counts[c]));
    s[i] = detail::silhouette_from(a, b);
  }
  return s;
}

/// Three-way histogram: s < low, low <= s <= high, s > high.
struct SilhouetteBins {
  double low = -1.0 / 3.0;
  double high = 1.0 / 3.0;
  std::size_t near_negative = 0;
  std::size_t near_zero = 0;
  std::size_t near_positive = 0;

  std::size_t total() const noexcept { return near_negative + near_zero + near_positive; }
  double fraction_negative() const { return fraction(near_negative); }
  double fraction_zero() const { return fraction(near_zero); }
  double fraction_positive() const { return fraction(near_positive); }

  enum class Bin { near_negative, near_zero, near_positive };
  Bin classify(double s) const noexcept {
    if (s < low) return Bin::near_negative;
    if (s > high) return Bin::near_positive;
    return Bin::near_zero;
  }

 private:
  double fraction(std::size_t c) const { return total() ? static_cast<double>(c) / static_cast<double>(total()) : 0.0; }
};

inline const char* bin_name(SilhouetteBins::Bin b) {
  switch (b) {
    case SilhouetteBins::Bin::near_negative: return "near_-1";
    case SilhouetteBins::Bin::near_zero: return "near_0";
    case SilhouetteBins::Bin::near_positive: return "near_+1";
  }
  return "?";
}

struct SilhouetteReport {
  std::vector<double> coefficients;
  std::vector<int> labels;
  /// Mean coefficient and member count per class tag.
  std::vector<double> per_class_mean;
  std::vector<std::size_t> per_class_count;
  SilhouetteBins bins;
};

inline SilhouetteReport summarize_silhouette(std::vector<double> coefficients, std::vector<int> labels,
                                             std::size_t num_classes, std::pair<double, double> thresholds) {
  const auto [low, high] = thresholds;
  if (!(low > -1.0 && low < high && high < 1.0)) throw DataError("bin thresholds must satisfy -1 < low < high < 1");
  if (coefficients.size() != labels.size()) throw DataError("coefficient and label counts differ");
  SilhouetteReport r;
  r.bins.low = low;
  r.bins.high = high;
  r.per_class_mean.assign(num_classes, 0.0);
  r.per_class_count.assign(num_classes, 0);
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= num_classes) throw DataError("label index out of range");
    r.per_class_mean[c] += coefficients[i];
    ++r.per_class_count[c];
    switch (r.bins.classify(coefficients[i])) {
      case SilhouetteBins::Bin::near_negative: ++r.bins.near_negative; break;
      case SilhouetteBins::Bin::near_zero: ++r.bins.near_zero; break;
      case SilhouetteBins::Bin::near_positive: ++r.bins.near_positive; break;
    }
  }
  for (std::size_t c = 0; c < num_classes; ++c)
    if (r.per_class_count[c]) r.per_class_mean[c] /= static_cast<double>(r.per_class_count[c]);
  r.coefficients = std::move(coefficients);
  r.labels = std::move(labels);
  return r;
}

inline SilhouetteReport silhouette_report(const Dataset& d,
                                          std::pair<double, double> thresholds = {-1.0 / 3.0, 1.0 / 3.0}) {
  return summarize_silhouette(silhouette_coefficients(d), d.labels, d.class_names.size(), thresholds);
}

/// w_i = (s_max - s_i) / (s_max - s_min): boundary samples weigh 1, the best-placed weigh 0.
struct GourmetWeights {
  std::vector<double> weights;
  double silh_max = 0.0;
  double silh_min = 0.0;
};

inline GourmetWeights gourmet_weights(std::span<const double> coefficients) {
  if (coefficients.empty()) throw DataError("no silhouette coefficients");
  const auto [lo, hi] = std::minmax_element(coefficients.begin(), coefficients.end());
  GourmetWeights g;
  g.silh_min = *lo;
  g.silh_max = *hi;
  if (!(g.silh_max > g.silh_min)) throw DegenerateWeighting("degenerate weighting: every silhouette is identical");
  const double span = g.silh_max - g.silh_min;
  g.weights.reserve(coefficients.size());
  for (double s : coefficients) g.weights.push_back(std::clamp((g.silh_max - s) / span, 0.0, 1.0));
  return g;
}

inline GourmetWeights gourmet_weights(const SilhouetteReport& report) { return gourmet_weights(report.coefficients); }

}  // namespace rebal
