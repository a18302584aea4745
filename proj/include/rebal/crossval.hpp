#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/metrics.hpp"
#include "rebal/rng.hpp"
#include "rebal/split.hpp"

namespace rebal {

/// Trains on `train` and scores on `test`; `fold` is 0-based.
using FoldRunner = std::function<MetricsReport(const Dataset& train, const Dataset& test, std::size_t fold)>;

struct CrossValidationResult {
  MetricsReport mean;
  std::vector<MetricsReport> folds;
  std::vector<std::size_t> fold_sizes;
};

/// Stratified k-fold cross-validation; the result holds the arithmetic mean
/// of the per-fold metrics plus every fold report.
inline CrossValidationResult kfold_cv(const Dataset& d, std::size_t k, const FoldRunner& run, std::uint64_t seed) {
  const auto fold_of = stratified_folds(d, k, seed);
  CrossValidationResult out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < d.size(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    const Dataset test = subset(d, test_rows);
    for (std::size_t c = 0; c < d.class_names.size(); ++c) {
      if (test.count(static_cast<int>(c)) == 0)
        throw DataError("fold " + std::to_string(f + 1) + " contains a single class");
    }
    out.fold_sizes.push_back(test_rows.size());
    out.folds.push_back(run(subset(d, train_rows), test, f));
  }
  out.mean = average_metrics(out.folds);
  return out;
}

}  // namespace rebal
