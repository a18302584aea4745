#pragma once

// Silhouette-ordered undersampling and the progressive-imbalance sweep used
// to locate the imbalance-degree fall-down threshold (IDft): the imbalance
// degree at the first sweep step where the classifier stops being acceptable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/metrics.hpp"
#include "rebal/rng.hpp"
#include "rebal/silhouette.hpp"
#include "rebal/split.hpp"

namespace rebal {

enum class RemovalOrder { descending, ascending, random };

inline const char* order_name(RemovalOrder o) {
  switch (o) {
    case RemovalOrder::descending: return "desc";
    case RemovalOrder::ascending: return "asc";
    case RemovalOrder::random: return "random";
  }
  return "?";
}

inline RemovalOrder parse_order(const std::string& s) {
  if (s == "desc" || s == "descending") return RemovalOrder::descending;
  if (s == "asc" || s == "ascending") return RemovalOrder::ascending;
  if (s == "random") return RemovalOrder::random;
  throw ConfigError("unknown removal order '" + s + "' (expected asc, desc or random)");
}

struct RemovalPlan {
  int target_class = 0;
  double fraction = 0.0;
  RemovalOrder order = RemovalOrder::descending;
  std::uint64_t seed = 0;
};

/// floor(fraction * class_count), robust to products like 0.29 * 100 = 28.999...
inline std::size_t removal_count(double fraction, std::size_t class_count) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DataError("removal fraction must lie in [0, 1]");
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(class_count) + 1e-9));
}

/// Members of `target` in removal priority. Silhouette ties keep ascending row order.
inline std::vector<std::size_t> removal_order(const Dataset& d, const SilhouetteReport& report, int target,
                                              RemovalOrder order, std::uint64_t seed) {
  if (report.coefficients.size() != d.size()) throw DataError("silhouette report does not match the dataset");
  std::vector<std::size_t> members = d.indices_of(target);
  const auto& s = report.coefficients;
  switch (order) {
    case RemovalOrder::descending:
      std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
      break;
    case RemovalOrder::ascending:
      std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
      break;
    case RemovalOrder::random: {
      Rng rng(derive_seed(seed, 31));
      rng.shuffle(std::span<std::size_t>(members));
      break;
    }
  }
  return members;
}

struct RemovalResult {
  Dataset reduced;
  Dataset removed;
  /// Rows of the input that ended up in `reduced` (in its shuffled order) and in `removed`.
  std::vector<std::size_t> reduced_index;
  std::vector<std::size_t> removed_index;
};

namespace detail {

inline RemovalResult apply_removal(const Dataset& train, std::span<const std::size_t> priority, std::size_t count,
                                   std::uint64_t seed) {
  std::vector<bool> drop(train.size(), false);
  RemovalResult out;
  out.removed_index.assign(priority.begin(), priority.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t r : out.removed_index) drop[r] = true;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (!drop[i]) out.reduced_index.push_back(i);
  Rng rng(derive_seed(seed, 32));
  rng.shuffle(std::span<std::size_t>(out.reduced_index));
  out.reduced = subset(train, out.reduced_index);
  out.removed = subset(train, out.removed_index);
  return out;
}

}  // namespace detail

/// Removes floor(fraction * |target|) members of the target class in the
/// plan's silhouette order. The retained rows are shuffled by the plan seed.
inline RemovalResult remove_fraction(const Dataset& train, const RemovalPlan& plan, const SilhouetteReport& report) {
  if (report.labels != train.labels) throw DataError("silhouette report was not computed on this training set");
  const std::size_t members = train.count(plan.target_class);
  if (members == 0) throw DataError("target class is not present");
  const std::size_t count = removal_count(plan.fraction, members);
  if (count >= members) throw DataError("removal would empty the target class");
  const auto priority = removal_order(train, report, plan.target_class, plan.order, plan.seed);
  return detail::apply_removal(train, priority, count, plan.seed);
}

// ---------------------------------------------------------------- sweep

struct SweepRecord {
  std::size_t iteration = 0;  // 1-based
  double fraction = 0.0;
  std::size_t removed = 0;
  double pct_target = 0.0;
  double pct_other = 0.0;
  double imbalance_degree = 0.0;
  MetricsReport metrics;
  bool acceptable = true;
};

struct SweepResult {
  int target_class = 0;
  RemovalOrder order = RemovalOrder::descending;
  MetricsReport baseline;
  std::vector<SweepRecord> records;
  /// First failing iteration (1-based) and its imbalance degree.
  std::optional<std::size_t> idft_iteration;
  std::optional<double> idft;
};

/// Trains on `reduced_train` and scores on held-out data. `removed` holds the
/// samples taken out at this step (to be appended to validation).
using SweepEvaluator =
    std::function<MetricsReport(const Dataset& reduced_train, const Dataset& removed, std::size_t iteration)>;

/// Decides whether a step's metrics are still acceptable relative to the baseline.
using Acceptability = std::function<bool(const MetricsReport& current, const MetricsReport& baseline)>;

/// Acceptable while F-measure >= ratio * baseline F-measure.
inline Acceptability relative_f_measure(double ratio = 0.5) {
  return [ratio](const MetricsReport& current, const MetricsReport& baseline) {
    return current.f_measure >= ratio * baseline.f_measure;
  };
}

struct SweepPlan {
  int target_class = 0;
  RemovalOrder order = RemovalOrder::descending;
  std::uint64_t seed = 0;
};

class SweepError : public Error {
 public:
  SweepError(std::size_t iteration, const std::string& what)
      : Error("sweep iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

namespace detail {

inline void check_fractions(std::span<const double> fractions) {
  if (fractions.empty()) throw ConfigError("sweep needs at least one fraction");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] < 1.0)) throw ConfigError("sweep fractions must lie in (0, 1)");
    if (i && !(fractions[i] > fractions[i - 1])) throw ConfigError("sweep fractions must be strictly ascending");
  }
}

inline MetricsReport run_evaluator(const SweepEvaluator& evaluate, const Dataset& reduced, const Dataset& removed,
                                   std::size_t iteration) {
  try {
    return evaluate(reduced, removed, iteration);
  } catch (const SweepError&) {
    throw;
  } catch (const std::exception& e) {
    throw SweepError(iteration, e.what());
  }
}

inline void fill_class_shares(SweepRecord& rec, const Dataset& reduced, int target) {
  const auto t = static_cast<double>(reduced.count(target));
  const auto total = static_cast<double>(reduced.size());
  rec.pct_target = 100.0 * t / total;
  rec.pct_other = 100.0 - rec.pct_target;
  rec.imbalance_degree = imbalance_degree(reduced);
}

inline void mark_idft(SweepResult& result, const Acceptability& acceptable) {
  for (auto& rec : result.records) {
    rec.acceptable = acceptable(rec.metrics, result.baseline);
    if (!rec.acceptable && !result.idft_iteration) {
      result.idft_iteration = rec.iteration;
      result.idft = rec.imbalance_degree;
    }
  }
}

}  // namespace detail

/// For each fraction: remove that share of the target class from the original
/// training set (ordering fixed once by `report`), train and score via
/// `evaluate`. Iteration 0 (nothing removed) is the baseline.
inline SweepResult idft_sweep(const Dataset& train, std::span<const double> fractions, const SweepPlan& plan,
                              const SilhouetteReport& report, const SweepEvaluator& evaluate,
                              const Acceptability& acceptable = relative_f_measure()) {
  detail::check_fractions(fractions);
  if (report.labels != train.labels) throw DataError("silhouette report was not computed on this training set");
  const std::size_t members = train.count(plan.target_class);
  if (members == 0) throw DataError("target class is not present");
  const auto priority = removal_order(train, report, plan.target_class, plan.order, plan.seed);

  SweepResult result;
  result.target_class = plan.target_class;
  result.order = plan.order;
  result.baseline = detail::run_evaluator(evaluate, train, empty_like(train), 0);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const std::size_t iteration = i + 1;
    const std::size_t count = removal_count(fractions[i], members);
    if (count >= members) throw SweepError(iteration, "removal would empty the target class");
    auto removal = detail::apply_removal(train, priority, count, derive_seed(plan.seed, iteration));
    SweepRecord rec;
    rec.iteration = iteration;
    rec.fraction = fractions[i];
    rec.removed = count;
    detail::fill_class_shares(rec, removal.reduced, plan.target_class);
    rec.metrics = detail::run_evaluator(evaluate, removal.reduced, removal.removed, iteration);
    result.records.push_back(std::move(rec));
  }
  detail::mark_idft(result, acceptable);
  return result;
}

inline SweepResult idft_sweep(const Dataset& train, std::span<const double> fractions, const SweepPlan& plan,
                              const SweepEvaluator& evaluate, const Acceptability& acceptable = relative_f_measure()) {
  return idft_sweep(train, fractions, plan, silhouette_report(train), evaluate, acceptable);
}

/// Scores one fold: train on `reduced_train`, test on `held_out`.
using FoldSweepEvaluator = std::function<MetricsReport(const Dataset& reduced_train, const Dataset& removed,
                                                       const Dataset& held_out, std::size_t iteration)>;

struct CrossValidatedSweep {
  SweepResult averaged;
  std::vector<SweepResult> folds;
};

/// k-fold version of idft_sweep: each fold sweeps its own training part
/// (silhouette recomputed per fold) and metrics are averaged per iteration.
/// IDft is read off the averaged records. Class shares and imbalance degree
/// are fold means; `removed` is the total over folds.
inline CrossValidatedSweep cross_validated_sweep(const Dataset& d, std::size_t k, std::span<const double> fractions,
                                                 const SweepPlan& plan, const FoldSweepEvaluator& evaluate,
                                                 const Acceptability& acceptable = relative_f_measure(),
                                                 std::pair<double, double> bins = {-1.0 / 3.0, 1.0 / 3.0}) {
  detail::check_fractions(fractions);
  const auto fold_of = stratified_folds(d, k, derive_seed(plan.seed, 33));
  CrossValidatedSweep out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < d.size(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    const Dataset train = subset(d, train_rows);
    const Dataset held_out = subset(d, test_rows);
    if (held_out.count(0) == 0 || (held_out.class_names.size() > 1 && held_out.count(1) == 0))
      throw DataError("fold " + std::to_string(f + 1) + " contains a single class");
    SweepPlan fold_plan = plan;
    fold_plan.seed = derive_seed(plan.seed, 100 + f);
    out.folds.push_back(idft_sweep(
        train, fractions, fold_plan, silhouette_report(train, bins),
        [&](const Dataset& reduced, const Dataset& removed, std::size_t it) {
          return evaluate(reduced, removed, held_out, it);
        },
        acceptable));
  }

  SweepResult& avg = out.averaged;
  avg.target_class = plan.target_class;
  avg.order = plan.order;
  std::vector<MetricsReport> per_fold;
  for (const auto& fr : out.folds) per_fold.push_back(fr.baseline);
  avg.baseline = average_metrics(per_fold);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    SweepRecord rec;
    rec.iteration = i + 1;
    rec.fraction = fractions[i];
    per_fold.clear();
    for (const auto& fr : out.folds) {
      const auto& r = fr.records[i];
      rec.removed += r.removed;
      rec.pct_target += r.pct_target / static_cast<double>(k);
      rec.pct_other += r.pct_other / static_cast<double>(k);
      rec.imbalance_degree += r.imbalance_degree / static_cast<double>(k);
      per_fold.push_back(r.metrics);
    }
    rec.metrics = average_metrics(per_fold);
    avg.records.push_back(std::move(rec));
  }
  detail::mark_idft(avg, acceptable);
  return out;
}

}  // namespace rebal
