#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rebal/error.hpp"
#include "rebal/matrix.hpp"

namespace rebal {

/// Feature matrix with binary class tags.
///
/// `labels[i]` indexes into `class_names`, which holds one or two names in
/// first-seen order. Which tag is the minority is decided at runtime by
/// class_counts().
struct Dataset {
  Matrix samples;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return samples.rows(); }
  std::size_t num_features() const noexcept { return samples.cols(); }
  std::span<const double> row(std::size_t i) const noexcept { return samples.row(i); }

  /// Throws DataError when an invariant does not hold.
  void validate() const {
    if (samples.rows() == 0) throw DataError("dataset has no samples");
    if (samples.cols() == 0) throw DataError("dataset has no features");
    if (labels.size() != samples.rows()) throw DataError("label count does not match sample count");
    if (feature_names.size() != samples.cols()) throw DataError("feature name count does not match feature count");
    if (class_names.empty() || class_names.size() > 2) throw DataError("dataset must have one or two class names");
    if (class_names.size() == 2 && class_names[0] == class_names[1]) throw DataError("class names must be distinct");
    for (int l : labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= class_names.size()) throw DataError("label index out of range");
    }
    for (double v : samples.values()) {
      if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
    }
  }

  std::size_t count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
  }

  /// Row indices carrying `label`, ascending.
  std::vector<std::size_t> indices_of(int label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) out.push_back(i);
    return out;
  }

  /// Class tag for a name; -1 when absent.
  int label_of(const std::string& name) const {
    for (std::size_t i = 0; i < class_names.size(); ++i)
      if (class_names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

/// Default feature names f1..fn.
inline std::vector<std::string> default_feature_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t j = 0; j < n; ++j) names.push_back("f" + std::to_string(j + 1));
  return names;
}

/// Same schema (features, class names), no rows.
inline Dataset empty_like(const Dataset& d) {
  Dataset out;
  out.samples = Matrix(0, d.num_features());
  out.feature_names = d.feature_names;
  out.class_names = d.class_names;
  return out;
}

inline Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out = empty_like(d);
  out.samples = d.samples.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(d.labels[i]);
  return out;
}

/// Appends `rows` to `d` tagged with `label`.
inline void append_rows(Dataset& d, const Matrix& rows, int label) {
  if (rows.rows() == 0) return;
  if (rows.cols() != d.num_features()) throw DataError("appended rows have the wrong dimensionality");
  if (label < 0 || static_cast<std::size_t>(label) >= d.class_names.size()) throw DataError("unknown class tag");
  d.samples.reserve_rows(d.size() + rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    d.samples.append_row(rows.row(i));
    d.labels.push_back(label);
  }
}

/// Rows of `a` followed by rows of `b`. Class tags of `b` are remapped by name.
inline Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.num_features() != b.num_features()) throw DataError("cannot concatenate datasets of different dimensionality");
  Dataset out = a;
  for (const auto& name : b.class_names) {
    if (out.label_of(name) < 0) {
      if (out.class_names.size() == 2) throw DataError("concatenation would produce more than two classes");
      out.class_names.push_back(name);
    }
  }
  out.samples.reserve_rows(a.size() + b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.samples.append_row(b.row(i));
    out.labels.push_back(out.label_of(b.class_names[static_cast<std::size_t>(b.labels[i])]));
  }
  return out;
}

struct ClassCounts {
  std::size_t minority_count = 0;
  std::size_t majority_count = 0;
  int minority_label = 0;
  int majority_label = 1;
};

/// Minority is the strictly smaller class; on a tie the lexicographically
/// smaller class name is the minority.
inline ClassCounts class_counts(const Dataset& d) {
  if (d.class_names.size() < 2) throw DataError("single-class dataset");
  const std::size_t c0 = d.count(0);
  const std::size_t c1 = d.count(1);
  if (c0 == 0 || c1 == 0) throw DataError("single-class dataset");
  bool zero_is_minority = c0 < c1 || (c0 == c1 && d.class_names[0] < d.class_names[1]);
  if (zero_is_minority) return {c0, c1, 0, 1};
  return {c1, c0, 1, 0};
}

/// m_min / m_max, in (0, 1].
inline double imbalance_degree(const ClassCounts& c) {
  return static_cast<double>(c.minority_count) / static_cast<double>(c.majority_count);
}

inline double imbalance_degree(const Dataset& d) { return imbalance_degree(class_counts(d)); }

/// Per-feature min-max scaler, fitted on one dataset and applied to others.
struct MinMaxScaler {
  std::vector<double> lower;
  std::vector<double> upper;

  static MinMaxScaler fit(const Matrix& x) {
    if (x.rows() == 0) throw DataError("cannot fit a scaler on an empty matrix");
    MinMaxScaler s;
    s.lower.assign(x.cols(), 0.0);
    s.upper.assign(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      s.lower[j] = s.upper[j] = x(0, j);
      for (std::size_t i = 1; i < x.rows(); ++i) {
        s.lower[j] = std::min(s.lower[j], x(i, j));
        s.upper[j] = std::max(s.upper[j], x(i, j));
      }
    }
    return s;
  }

  /// Constant columns map to 0.
  Matrix transform(const Matrix& x) const {
    if (x.cols() != lower.size()) throw DataError("scaler dimensionality mismatch");
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (std::size_t j = 0; j < out.cols(); ++j) {
        const double range = upper[j] - lower[j];
        out(i, j) = range > 0.0 ? (out(i, j) - lower[j]) / range : 0.0;
      }
    }
    return out;
  }

  Dataset transform(const Dataset& d) const {
    Dataset out = d;
    out.samples = transform(d.samples);
    return out;
  }
};

}  // namespace rebal
