#pragma once

// Slow, direct reference implementations used to cross-check the library.
// Nothing here calls into the code under test; test data is drawn from
// std::mt19937_64 so the generators are independent of rebal::Rng too.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rebal/dataset.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows rows_of(const rebal::Matrix& m) {
  Rows out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

/// s(t) straight from the piecewise definition with two label clusters.
inline std::vector<double> silhouettes(const Rows& x, const std::vector<int>& labels) {
  const std::size_t m = x.size();
  std::vector<double> s(m, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    double same = 0.0, other = 0.0;
    std::size_t n_same = 0, n_other = 0;
    for (std::size_t u = 0; u < m; ++u) {
      if (u == t) continue;
      const double d = distance(x[t], x[u]);
      if (labels[u] == labels[t]) {
        same += d;
        ++n_same;
      } else {
        other += d;
        ++n_other;
      }
    }
    if (n_same == 0) continue;  // singleton class
    const double a = same / static_cast<double>(n_same);
    const double b = other / static_cast<double>(n_other);
    const double denom = std::max(a, b);
    s[t] = denom == 0.0 ? 0.0 : (b - a) / denom;
  }
  return s;
}

/// Label of the nearest reference; the first one wins on equal distance.
inline int nn1(const Rows& refs, const std::vector<int>& labels, const std::vector<double>& q) {
  std::size_t best = 0;
  double best_d = distance(refs[0], q);
  for (std::size_t i = 1; i < refs.size(); ++i) {
    const double d = distance(refs[i], q);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return labels[best];
}

/// Reference indices ordered by (distance, index).
inline std::vector<std::size_t> ranked(const Rows& refs, const std::vector<double>& q, std::size_t skip = SIZE_MAX) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < refs.size(); ++i)
    if (i != skip) all.emplace_back(distance(refs[i], q), i);
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (const auto& p : all) out.push_back(p.second);
  return out;
}

inline int knn_label(const Rows& refs, const std::vector<int>& labels, const std::vector<double>& q, std::size_t k) {
  const auto order = ranked(refs, q);
  std::vector<int> votes(2, 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(labels[order[i]])];
  return votes[1] > votes[0] ? 1 : 0;
}

/// Majority-neighbour share among the k nearest (all classes) of each minority row.
inline std::vector<double> adasyn_raw_ratios(const Rows& x, const std::vector<int>& labels, int minority,
                                             std::size_t k) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (labels[i] != minority) continue;
    const auto order = ranked(x, x[i], i);
    std::size_t maj = 0;
    for (std::size_t r = 0; r < k; ++r) maj += labels[order[r]] != minority;
    out.push_back(static_cast<double>(maj) / static_cast<double>(k));
  }
  return out;
}

/// Mann-Whitney U / (P * N) with ties counted one half.
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
  double wins = 0.0;
  std::size_t p = 0, n = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    ++p;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (int v : positive) n += v == 0;
  return wins / (static_cast<double>(p) * static_cast<double>(n));
}

/// Two-pass population mean and standard deviation per column.
inline std::pair<std::vector<double>, std::vector<double>> moments(const Rows& x) {
  const std::size_t n = x[0].size();
  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < n; ++j) mean[j] += r[j];
  for (auto& v : mean) v /= static_cast<double>(x.size());
  for (const auto& r : x)
    for (std::size_t j = 0; j < n; ++j) sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (auto& v : sd) v = std::sqrt(v / static_cast<double>(x.size()));
  return {mean, sd};
}

inline std::pair<std::vector<double>, std::vector<double>> weighted_moments(const Rows& x,
                                                                            const std::vector<double>& w) {
  const std::size_t n = x[0].size();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) mean[j] += w[i] * x[i][j];
  for (auto& v : mean) v /= total;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) sd[j] += w[i] * (x[i][j] - mean[j]) * (x[i][j] - mean[j]);
  for (auto& v : sd) v = std::sqrt(v / total);
  return {mean, sd};
}

/// Pearson r from the sample covariance matrix: cov_ij / sqrt(cov_ii cov_jj).
inline Rows pearson(const Rows& x) {
  const std::size_t m = x.size(), n = x[0].size();
  std::vector<double> mean(n, 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < n; ++j) mean[j] += r[j] / static_cast<double>(m);
  Rows cov(n, std::vector<double>(n, 0.0));
  for (const auto& r : x)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) cov[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]) / static_cast<double>(m - 1);
  Rows out(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out[a][b] = cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]);
  return out;
}

/// True when p = a + w (b - a) for some w in [0, 1], within tol per coordinate.
inline bool on_segment(const std::vector<double>& p, const std::vector<double>& a, const std::vector<double>& b,
                       double tol = 1e-9) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    num += (p[j] - a[j]) * (b[j] - a[j]);
    den += (b[j] - a[j]) * (b[j] - a[j]);
  }
  const double w = den == 0.0 ? 0.0 : num / den;
  if (w < -tol || w > 1.0 + tol) return false;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (std::abs(a[j] + w * (b[j] - a[j]) - p[j]) > tol) return false;
  return true;
}

// ---------------------------------------------------------------- generators

inline double normal(std::mt19937_64& g, double mean = 0.0, double sd = 1.0) {
  return std::normal_distribution<double>(mean, sd)(g);
}

inline std::size_t uniform_int(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

/// Two Gaussian blobs, class 1 shifted by `shift` along every axis.
inline rebal::Dataset blobs(std::mt19937_64& g, std::size_t m0, std::size_t m1, std::size_t n, double shift,
                            const std::string& name0 = "A", const std::string& name1 = "B") {
  rebal::Dataset d;
  d.samples = rebal::Matrix(0, n);
  d.feature_names = rebal::default_feature_names(n);
  d.class_names = {name0, name1};
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m0 + m1; ++i) {
    const int label = i < m0 ? 0 : 1;
    for (auto& v : row) v = normal(g) + (label ? shift : 0.0);
    d.samples.append_row(row);
    d.labels.push_back(label);
  }
  return d;
}

}  // namespace oracle
