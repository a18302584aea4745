#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/rng.hpp"

namespace rebal {

struct SplitSpec {
  double train_fraction = 0.85;
  double test_fraction = 0.15;
  /// Share of the training part held out as validation.
  double validation_fraction = 0.15;
  std::uint64_t seed = 0;

  void validate() const {
    auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_open_unit(train_fraction) || !in_open_unit(test_fraction) || !in_open_unit(validation_fraction))
      throw ConfigError("split fractions must lie in (0, 1)");
    if (std::abs(train_fraction + test_fraction - 1.0) > 1e-9)
      throw ConfigError("train and test fractions must sum to 1");
  }
};

namespace detail {

/// Splits `total` into integer shares proportional to `sizes` (largest
/// remainder, ties to the lower index) so that the shares sum exactly to `total`.
inline std::vector<std::size_t> proportional_shares(std::span<const std::size_t> sizes, std::size_t total) {
  const std::size_t sum = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> shares(sizes.size(), 0);
  if (sum == 0) return shares;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double exact = static_cast<double>(total) * static_cast<double>(sizes[i]) / static_cast<double>(sum);
    shares[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += shares[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && r < remainders.size(); ++r, ++assigned) ++shares[remainders[r].second];
  return shares;
}

inline std::size_t rounded_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace detail

/// Stratified two-way partition of `rows` (indices into `d`). The first part
/// receives round(first_fraction * |rows|) rows, allotted to classes in
/// proportion to their counts. Both outputs are sorted ascending.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_partition(
    const Dataset& d, std::span<const std::size_t> rows, double first_fraction, std::uint64_t seed) {
  const std::size_t num_classes = std::max<std::size_t>(d.class_names.size(), 1);
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i : rows) by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);

  std::vector<std::size_t> sizes;
  for (const auto& c : by_class) sizes.push_back(c.size());
  const auto shares = detail::proportional_shares(sizes, detail::rounded_count(first_fraction, rows.size()));

  Rng rng(seed);
  std::vector<std::size_t> first, second;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto members = by_class[c];
    rng.shuffle(std::span<std::size_t>(members));
    first.insert(first.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(shares[c]));
    second.insert(second.end(), members.begin() + static_cast<std::ptrdiff_t>(shares[c]), members.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {std::move(first), std::move(second)};
}

struct SplitParts {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> validation_index;
  std::vector<std::size_t> test_index;
};

/// Stratified train/test split followed by a stratified validation hold-out
/// carved from the training part. Deterministic given spec.seed.
inline SplitParts split(const Dataset& d, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  auto [test_idx, rest] = stratified_partition(d, all, spec.test_fraction, derive_seed(spec.seed, 1));
  auto [val_idx, train_idx] = stratified_partition(d, rest, spec.validation_fraction, derive_seed(spec.seed, 2));
  if (test_idx.empty() || val_idx.empty() || train_idx.empty()) throw DataError("empty split part");

  SplitParts parts;
  parts.train = subset(d, train_idx);
  parts.validation = subset(d, val_idx);
  parts.test = subset(d, test_idx);
  parts.train_index = std::move(train_idx);
  parts.validation_index = std::move(val_idx);
  parts.test_index = std::move(test_idx);
  return parts;
}

/// Stratified fold assignment: each class is shuffled, the classes are
/// concatenated and rows are dealt round-robin, so fold sizes differ by at
/// most one overall and per class. Returns the fold index of every row.
inline std::vector<std::size_t> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (k > d.size()) throw DataError("more folds than samples");
  Rng rng(seed);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < d.class_names.size(); ++c) {
    auto members = d.indices_of(static_cast<int>(c));
    rng.shuffle(std::span<std::size_t>(members));
    order.insert(order.end(), members.begin(), members.end());
  }
  std::vector<std::size_t> fold(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold[order[i]] = i % k;
  return fold;
}

}  // namespace rebal
