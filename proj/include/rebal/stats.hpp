#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rebal/error.hpp"
#include "rebal/matrix.hpp"

namespace rebal {

/// Per-feature location and spread handed to the Gaussian generator.
struct FeatureStats {
  std::vector<double> means;
  std::vector<double> std_devs;
  bool weighted = false;

  std::size_t size() const noexcept { return means.size(); }
};

/// Column means and population standard deviations (divisor m), via Welford updates.
inline FeatureStats feature_stats(const Matrix& samples) {
  if (samples.rows() < 2) throw DataError("feature statistics need at least 2 rows");
  const std::size_t n = samples.cols();
  FeatureStats s;
  s.means.assign(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    const double count = static_cast<double>(i + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = samples(i, j);
      const double delta = x - s.means[j];
      s.means[j] += delta / count;
      m2[j] += delta * (x - s.means[j]);
    }
  }
  s.std_devs.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    s.std_devs[j] = std::sqrt(std::max(0.0, m2[j] / static_cast<double>(samples.rows())));
  return s;
}

/// Weighted mean sum(w x)/sum(w) and weighted population deviation
/// sqrt(sum(w (x - mean)^2) / sum(w)).
inline FeatureStats weighted_feature_stats(const Matrix& samples, std::span<const double> weights) {
  if (weights.size() != samples.rows()) throw DataError("weight count does not match row count");
  if (samples.rows() == 0) throw DataError("weighted statistics need at least one row");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw DataError("weights must be finite");
    if (w < 0.0) throw DataError("negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw DataError("all weights are zero");

  const std::size_t n = samples.cols();
  FeatureStats s;
  s.weighted = true;
  s.means.assign(n, 0.0);
  s.std_devs.assign(n, 0.0);
  for (std::size_t i = 0; i < samples.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) s.means[j] += weights[i] * samples(i, j);
  for (double& m : s.means) m /= total;
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = samples(i, j) - s.means[j];
      s.std_devs[j] += weights[i] * d * d;
    }
  }
  for (double& sd : s.std_devs) sd = std::sqrt(sd / total);
  return s;
}

}  // namespace rebal
