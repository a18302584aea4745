#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "rebal/error.hpp"
#include "rebal/matrix.hpp"

namespace rebal {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("distance between vectors of different length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Brute-force Euclidean nearest-neighbour index over a fixed reference set.
///
/// Neighbours are ranked by distance; equal distances rank the lower reference
/// index first, so a tie at rank k keeps the lower index.
class NeighborIndex {
 public:
  NeighborIndex(Matrix references, std::vector<int> labels)
      : refs_(std::move(references)), labels_(std::move(labels)) {
    if (refs_.rows() == 0) throw DataError("neighbor index needs a non-empty reference set");
    if (labels_.size() != refs_.rows()) throw DataError("reference label count does not match reference count");
  }

  std::size_t size() const noexcept { return refs_.rows(); }
  std::size_t dimension() const noexcept { return refs_.cols(); }
  const Matrix& references() const noexcept { return refs_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// k nearest references, closest first. `exclude` drops one reference
  /// (used when the query is itself a member of the reference set).
  std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k,
                                std::optional<std::size_t> exclude = std::nullopt) const {
    check_query(query);
    const std::size_t available = refs_.rows() - (exclude && *exclude < refs_.rows() ? 1 : 0);
    if (k == 0 || k > available) throw DataError("k must be between 1 and the number of references");
    std::vector<Neighbor> all;
    all.reserve(refs_.rows());
    for (std::size_t i = 0; i < refs_.rows(); ++i) {
      if (exclude && *exclude == i) continue;
      all.push_back({i, squared_distance(query, refs_.row(i))});
    }
    auto closer = [](const Neighbor& a, const Neighbor& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    for (auto& nb : all) nb.distance = std::sqrt(nb.distance);
    return all;
  }

  /// Majority label among the k nearest references. k must be odd.
  int knn_classify(std::span<const double> query, std::size_t k) const {
    if (k % 2 == 0) throw DataError("k must be odd");
    const auto nbrs = nearest(query, k);
    std::vector<std::size_t> votes;
    for (const auto& nb : nbrs) {
      const auto l = static_cast<std::size_t>(labels_[nb.index]);
      if (l >= votes.size()) votes.resize(l + 1, 0);
      ++votes[l];
    }
    // Vote ties (only possible with more than two labels) go to the label of the nearer neighbour.
    std::size_t best = static_cast<std::size_t>(labels_[nbrs.front().index]);
    for (std::size_t l = 0; l < votes.size(); ++l)
      if (votes[l] > votes[best]) best = l;
    return static_cast<int>(best);
  }

  /// Label of the single nearest reference (lowest index on exact ties).
  int nn1_classify(std::span<const double> query) const {
    check_query(query);
    std::size_t best = 0;
    double best_d = squared_distance(query, refs_.row(0));
    for (std::size_t i = 1; i < refs_.rows(); ++i) {
      const double d = squared_distance(query, refs_.row(i));
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return labels_[best];
  }

 private:
  void check_query(std::span<const double> query) const {
    if (query.size() != refs_.cols()) throw DataError("query dimensionality does not match the reference set");
  }

  Matrix refs_;
  std::vector<int> labels_;
};

}  // namespace rebal
