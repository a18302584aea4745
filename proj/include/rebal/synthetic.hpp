#pragma once

// Seeded Gaussian-mixture datasets used as stand-ins for real traffic data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/rng.hpp"

namespace rebal {

/// One Gaussian component. An empty covariance means identity; a covariance
/// with a single row is read as the diagonal; otherwise it must be n x n,
/// symmetric and positive semi-definite.
struct ClusterSpec {
  std::string label;
  std::vector<double> mean;
  Matrix covariance;
  std::size_t count = 0;
};

struct SyntheticSpec {
  std::vector<ClusterSpec> clusters;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
};

namespace detail {

/// Lower Cholesky factor of a PSD matrix. Zero pivots are allowed (degenerate
/// directions); negative ones are not.
inline Matrix psd_cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  const double tol = 1e-12;
  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    double scale = 1.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(a(k, k)));
    if (diag < -tol * scale) throw DataError("invalid covariance: not positive semi-definite");
    const double pivot = diag > tol * scale ? std::sqrt(diag) : 0.0;
    l(j, j) = pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      if (pivot > 0.0) {
        l(i, j) = v / pivot;
      } else if (std::abs(v) > 1e-9 * scale) {
        throw DataError("invalid covariance: not positive semi-definite");
      }
    }
  }
  return l;
}

inline Matrix covariance_factor(const ClusterSpec& c, std::size_t n) {
  if (c.covariance.rows() == 0) {
    Matrix id(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) id(j, j) = 1.0;
    return id;
  }
  if (c.covariance.rows() == 1 && c.covariance.cols() == n) {
    Matrix diag(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = c.covariance(0, j);
      if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("invalid covariance: negative or non-finite variance");
      diag(j, j) = std::sqrt(v);
    }
    return diag;
  }
  if (c.covariance.rows() != n || c.covariance.cols() != n) throw DataError("invalid covariance: wrong shape");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.covariance(i, i) >= 0.0)) throw DataError("invalid covariance: negative variance");
    for (std::size_t j = 0; j < i; ++j) {
      const double a = c.covariance(i, j), b = c.covariance(j, i);
      if (!std::isfinite(a) || std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
        throw DataError("invalid covariance: not symmetric");
    }
  }
  return psd_cholesky(c.covariance);
}

}  // namespace detail

inline Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.clusters.empty()) throw DataError("synthetic spec has no clusters");
  const std::size_t n = spec.clusters.front().mean.size();
  if (n == 0) throw DataError("synthetic spec has zero features");

  Dataset d;
  d.feature_names = spec.feature_names.empty() ? default_feature_names(n) : spec.feature_names;
  if (d.feature_names.size() != n) throw DataError("feature name count does not match cluster dimensionality");
  d.samples = Matrix(0, n);

  Rng rng(spec.seed);
  std::vector<double> z(n), x(n);
  for (const auto& c : spec.clusters) {
    if (c.mean.size() != n) throw DataError("clusters disagree on dimensionality");
    if (c.count == 0) throw DataError("cluster count must be at least 1");
    int tag = d.label_of(c.label);
    if (tag < 0) {
      if (d.class_names.size() == 2) throw DataError("synthetic spec names more than two classes");
      d.class_names.push_back(c.label);
      tag = static_cast<int>(d.class_names.size()) - 1;
    }
    const Matrix factor = detail::covariance_factor(c, n);
    for (std::size_t s = 0; s < c.count; ++s) {
      for (auto& v : z) v = rng.gaussian();
      for (std::size_t i = 0; i < n; ++i) {
        double v = c.mean[i];
        for (std::size_t k = 0; k <= i; ++k) v += factor(i, k) * z[k];
        x[i] = v;
      }
      d.samples.append_row(x);
      d.labels.push_back(tag);
    }
  }
  d.validate();
  return d;
}

/// Two-class, n-feature mixture with a shared equicorrelated covariance.
/// The minority class sits at +separation/2 along every axis and the majority
/// at -separation/2; `correlation` is the off-diagonal coefficient.
inline SyntheticSpec two_class_spec(std::size_t minority, std::size_t majority, std::size_t n = 11,
                                    double separation = 2.0, double correlation = 0.5, std::uint64_t seed = 0) {
  Matrix cov(n, n, correlation);
  for (std::size_t j = 0; j < n; ++j) cov(j, j) = 1.0;
  SyntheticSpec spec;
  spec.seed = seed;
  spec.clusters.push_back({"minority", std::vector<double>(n, separation / 2.0), cov, minority});
  spec.clusters.push_back({"majority", std::vector<double>(n, -separation / 2.0), cov, majority});
  return spec;
}

/// Two-class mixture whose minority class has two components on opposite
/// sides of the majority (centred at the origin): a "near" one at +near * u
/// and a "far" one at -far * u, with u = (+1, -1, +1, ...). The direction u
/// is a low-variance axis of the equicorrelated covariance, so the classes
/// are well separated while the features stay correlated. The far component
/// gets the higher silhouettes.
inline SyntheticSpec opposed_minority_spec(std::size_t minority, std::size_t majority, std::size_t n = 11,
                                           double near = 1.5, double far = 3.0, double correlation = 0.5,
                                           std::uint64_t seed = 0) {
  Matrix cov(n, n, correlation);
  for (std::size_t j = 0; j < n; ++j) cov(j, j) = 1.0;
  std::vector<double> near_mean(n), far_mean(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    near_mean[j] = sign * near;
    far_mean[j] = -sign * far;
  }
  SyntheticSpec spec;
  spec.seed = seed;
  const std::size_t far_count = minority / 2;
  spec.clusters.push_back({"minority", near_mean, cov, minority - far_count});
  spec.clusters.push_back({"minority", far_mean, cov, far_count});
  spec.clusters.push_back({"majority", std::vector<double>(n, 0.0), cov, majority});
  return spec;
}

}  // namespace rebal
