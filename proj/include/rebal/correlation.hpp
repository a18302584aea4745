#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/matrix.hpp"

namespace rebal {

/// Pearson coefficients between every pair of features.
struct CorrelationMatrix {
  Matrix values;
  std::vector<std::string> names;
  /// Features with zero variance; their off-diagonal entries are reported as 0.
  std::vector<bool> zero_variance;

  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
  std::size_t size() const noexcept { return values.rows(); }
};

inline CorrelationMatrix pearson_matrix(const Matrix& x, std::vector<std::string> names = {}) {
  const std::size_t m = x.rows(), n = x.cols();
  if (m < 2) throw DataError("correlation needs at least 2 samples");
  if (names.empty()) names = default_feature_names(n);

  // Centre each column, then r_ij = <c_i, c_j> / (|c_i| |c_j|).
  std::vector<double> mean(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) mean[j] += x(i, j);
  for (double& v : mean) v /= static_cast<double>(m);
  Matrix centred(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) centred(i, j) = x(i, j) - mean[j];

  std::vector<double> norm(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += centred(i, j) * centred(i, j);
    norm[j] = std::sqrt(s);
  }

  CorrelationMatrix out;
  out.values = Matrix(n, n, 0.0);
  out.names = std::move(names);
  out.zero_variance.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.zero_variance[j] = norm[j] == 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    out.values(a, a) = 1.0;
    if (out.zero_variance[a]) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (out.zero_variance[b]) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += centred(i, a) * centred(i, b);
      const double r = std::clamp(dot / (norm[a] * norm[b]), -1.0, 1.0);
      out.values(a, b) = r;
      out.values(b, a) = r;
    }
  }
  return out;
}

inline CorrelationMatrix pearson_matrix(const Dataset& d) { return pearson_matrix(d.samples, d.feature_names); }

/// Mean |r| over the off-diagonal entries.
inline double mean_abs_off_diagonal(const CorrelationMatrix& c) {
  const std::size_t n = c.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sum += std::abs(c(i, j));
  return sum / static_cast<double>(n * (n - 1));
}

}  // namespace rebal
