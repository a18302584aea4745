#pragma once

// Synthetic minority generators.
//
// SMOTE and ADASYN interpolate between a minority sample and one of its k
// nearest minority neighbours. G1No draws every feature independently from a
// Gaussian fitted to the minority class and keeps a candidate only if a 1NN
// classifier assigns it to the minority class and it does not duplicate an
// existing row. G1No Gourmet fits that Gaussian with silhouette weights that
// favour samples near the class boundary.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/neighbors.hpp"
#include "rebal/rng.hpp"
#include "rebal/silhouette.hpp"
#include "rebal/split.hpp"
#include "rebal/stats.hpp"

namespace rebal {

enum class Algorithm { smote, adasyn, g1no, g1no_gourmet };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::smote: return "smote";
    case Algorithm::adasyn: return "adasyn";
    case Algorithm::g1no: return "g1no";
    case Algorithm::g1no_gourmet: return "g1no-gourmet";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "smote") return Algorithm::smote;
  if (s == "adasyn") return Algorithm::adasyn;
  if (s == "g1no") return Algorithm::g1no;
  if (s == "g1no-gourmet" || s == "g1no_gourmet" || s == "gourmet") return Algorithm::g1no_gourmet;
  throw ConfigError("unknown algorithm '" + s + "' (expected smote, adasyn, g1no or g1no-gourmet)");
}

/// Where an interpolated sample came from: base + weight * (neighbor - base),
/// both indices referring to rows of the minority matrix.
struct InterpolationOrigin {
  std::size_t base = 0;
  std::size_t neighbor = 0;
  double weight = 0.0;
};

struct SyntheticBatch {
  Matrix samples;
  Algorithm algorithm = Algorithm::smote;
  std::uint64_t seed = 0;
  std::size_t accepted_count = 0;
  std::size_t rejected_by_1nn = 0;
  std::size_t rejected_duplicate = 0;
  std::size_t attempts = 0;

  /// SMOTE / ADASYN only.
  std::vector<InterpolationOrigin> origins;
  /// G1No family only: Gaussian parameters, the 1NN reference rows (indices
  /// into the training set) and the 1NN accuracy on the held-back rows.
  std::optional<FeatureStats> generator_stats;
  std::vector<std::size_t> filter_reference;
  std::optional<double> filter_validation_accuracy;
};

/// Raised when the attempt budget runs out; carries what was accepted so far.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(SyntheticBatch partial, std::size_t requested)
      : Error("attempt budget exhausted: accepted " + std::to_string(partial.accepted_count) + " of " +
              std::to_string(requested) + " after " + std::to_string(partial.attempts) + " attempts"),
        partial_(std::move(partial)),
        requested_(requested) {}

  const SyntheticBatch& partial() const noexcept { return partial_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  SyntheticBatch partial_;
  std::size_t requested_;
};

/// Exact (bitwise) row membership.
class RowSet {
 public:
  bool contains(std::span<const double> row) const { return rows_.count(key(row)) > 0; }
  bool insert(std::span<const double> row) { return rows_.insert(key(row)).second; }
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  static std::vector<std::uint64_t> key(std::span<const double> row) {
    std::vector<std::uint64_t> k(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) k[i] = std::bit_cast<std::uint64_t>(row[i]);
    return k;
  }
  std::set<std::vector<std::uint64_t>> rows_;
};

// ---------------------------------------------------------------- SMOTE / ADASYN

/// (1 - w) a + w b, which reproduces a at w = 0 and b at w = 1 exactly.
inline void interpolate(std::span<const double> a, std::span<const double> b, double w, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (1.0 - w) * a[j] + w * b[j];
}

namespace detail {

/// k nearest minority neighbours of every minority row (self excluded).
inline std::vector<std::vector<std::size_t>> minority_neighbors(const Matrix& minority, std::size_t k) {
  NeighborIndex index(minority, std::vector<int>(minority.rows(), 0));
  std::vector<std::vector<std::size_t>> out(minority.rows());
  for (std::size_t i = 0; i < minority.rows(); ++i) {
    for (const auto& nb : index.nearest(minority.row(i), k, i)) out[i].push_back(nb.index);
  }
  return out;
}

inline void emit_interpolated(SyntheticBatch& batch, const Matrix& minority,
                              const std::vector<std::vector<std::size_t>>& neighbors, std::size_t base, Rng& rng,
                              std::vector<double>& buf) {
  const auto& nbrs = neighbors[base];
  const std::size_t nb = nbrs[rng.index(nbrs.size())];
  const double w = rng.uniform_closed();
  interpolate(minority.row(base), minority.row(nb), w, buf);
  batch.samples.append_row(buf);
  batch.origins.push_back({base, nb, w});
  ++batch.accepted_count;
  ++batch.attempts;
}

}  // namespace detail

/// g samples, each interpolated between a uniformly chosen minority row and a
/// uniformly chosen one of its k nearest minority neighbours.
inline SyntheticBatch smote(const Matrix& minority, std::size_t k, std::size_t g, std::uint64_t seed) {
  if (minority.rows() == 0) throw DataError("SMOTE needs a non-empty minority set");
  if (k == 0) throw DataError("SMOTE needs k >= 1");
  if (k >= minority.rows()) throw DataError("SMOTE needs more minority samples than k");
  SyntheticBatch batch;
  batch.algorithm = Algorithm::smote;
  batch.seed = seed;
  batch.samples = Matrix(0, minority.cols());
  if (g == 0) return batch;
  const auto neighbors = detail::minority_neighbors(minority, k);
  Rng rng(seed);
  std::vector<double> buf(minority.cols());
  batch.samples.reserve_rows(g);
  for (std::size_t s = 0; s < g; ++s) detail::emit_interpolated(batch, minority, neighbors, rng.index(minority.rows()), rng, buf);
  return batch;
}

struct AdasynAllocation {
  /// Dataset row of each minority sample, ascending.
  std::vector<std::size_t> minority_rows;
  /// Share of majority samples among the k nearest neighbours (all classes).
  std::vector<double> raw_ratios;
  /// raw_ratios normalised to sum to 1 (uniform when they are all zero).
  std::vector<double> ratios;
  std::vector<std::size_t> quotas;
  bool uniform_fallback = false;
};

inline AdasynAllocation adasyn_allocation(const Dataset& d, std::size_t k, std::size_t g) {
  const ClassCounts counts = class_counts(d);
  if (counts.minority_count == 0) throw DataError("ADASYN needs a non-empty minority class");
  if (k == 0 || k > d.size() - 1) throw DataError("ADASYN needs 1 <= k <= m - 1");

  AdasynAllocation a;
  a.minority_rows = d.indices_of(counts.minority_label);
  NeighborIndex index(d.samples, d.labels);
  for (std::size_t row : a.minority_rows) {
    std::size_t majority = 0;
    for (const auto& nb : index.nearest(d.row(row), k, row))
      if (d.labels[nb.index] != counts.minority_label) ++majority;
    a.raw_ratios.push_back(static_cast<double>(majority) / static_cast<double>(k));
  }
  const double total = std::accumulate(a.raw_ratios.begin(), a.raw_ratios.end(), 0.0);
  a.uniform_fallback = total == 0.0;
  const double uniform = 1.0 / static_cast<double>(a.raw_ratios.size());
  for (double r : a.raw_ratios) a.ratios.push_back(a.uniform_fallback ? uniform : r / total);

  // Largest remainder, ties to the lower index.
  a.quotas.assign(a.ratios.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < a.ratios.size(); ++i) {
    const double exact = a.ratios[i] * static_cast<double>(g);
    a.quotas[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += a.quotas[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  // Floating-point floors can leave the sum marginally above g; trim from the smallest remainders.
  for (auto it = rem.rbegin(); assigned > g && it != rem.rend(); ++it) {
    if (a.quotas[it->second] > 0) {
      --a.quotas[it->second];
      --assigned;
    }
  }
  for (std::size_t i = 0; assigned < g; i = (i + 1) % rem.size(), ++assigned) ++a.quotas[rem[i].second];
  return a;
}

/// Each minority row x_i seeds g_i interpolated samples, with g_i from adasyn_allocation.
inline SyntheticBatch adasyn(const Dataset& d, std::size_t k, std::size_t g, std::uint64_t seed) {
  const auto alloc = adasyn_allocation(d, k, g);
  const Matrix minority = d.samples.select_rows(alloc.minority_rows);
  SyntheticBatch batch;
  batch.algorithm = Algorithm::adasyn;
  batch.seed = seed;
  batch.samples = Matrix(0, d.num_features());
  if (g == 0) return batch;
  if (minority.rows() < 2) throw DataError("ADASYN needs at least two minority samples to interpolate");
  const auto neighbors = detail::minority_neighbors(minority, std::min(k, minority.rows() - 1));
  Rng rng(seed);
  std::vector<double> buf(d.num_features());
  batch.samples.reserve_rows(g);
  for (std::size_t i = 0; i < alloc.quotas.size(); ++i)
    for (std::size_t s = 0; s < alloc.quotas[i]; ++s) detail::emit_interpolated(batch, minority, neighbors, i, rng, buf);
  return batch;
}

// ---------------------------------------------------------------- GRNG / G1No

struct GrngSpec {
  std::size_t count = 0;
  FeatureStats stats;
  std::size_t max_attempts_factor = 1000;
};

using SampleAcceptor = std::function<bool(std::span<const double>)>;
using DuplicateCheck = std::function<bool(std::span<const double>)>;

/// Draws candidates feature-wise from N(mean_f, sd_f). A candidate is kept
/// when `accept` approves it and it is neither `is_duplicate` nor already in
/// the batch. Stops after `count` acceptances; throws BudgetExhausted after
/// max_attempts_factor * count draws.
inline SyntheticBatch grng(const GrngSpec& spec, const SampleAcceptor& accept, const DuplicateCheck& is_duplicate,
                           std::uint64_t seed, Algorithm tag = Algorithm::g1no) {
  const std::size_t n = spec.stats.size();
  if (n == 0 || spec.stats.std_devs.size() != n) throw DataError("generator statistics are malformed");
  for (double sd : spec.stats.std_devs)
    if (!(sd >= 0.0) || !std::isfinite(sd)) throw DataError("generator standard deviations must be finite and >= 0");
  if (spec.max_attempts_factor == 0) throw ConfigError("attempt factor must be at least 1");

  SyntheticBatch batch;
  batch.algorithm = tag;
  batch.seed = seed;
  batch.samples = Matrix(0, n);
  batch.generator_stats = spec.stats;
  if (spec.count == 0) return batch;

  const std::size_t budget = spec.max_attempts_factor * spec.count;
  Rng rng(seed);
  RowSet generated;
  std::vector<double> candidate(n);
  while (batch.accepted_count < spec.count) {
    if (batch.attempts == budget) throw BudgetExhausted(std::move(batch), spec.count);
    ++batch.attempts;
    for (std::size_t j = 0; j < n; ++j) candidate[j] = rng.gaussian(spec.stats.means[j], spec.stats.std_devs[j]);
    if (!accept(candidate)) {
      ++batch.rejected_by_1nn;
      continue;
    }
    if (generated.contains(candidate) || is_duplicate(candidate)) {
      ++batch.rejected_duplicate;
      continue;
    }
    generated.insert(candidate);
    batch.samples.append_row(candidate);
    ++batch.accepted_count;
  }
  return batch;
}

struct G1noConfig {
  /// Share of the training set the 1NN filter is fitted on; the rest is
  /// held back to measure the filter's accuracy. 1.0 uses every row.
  double filter_fraction = 0.75;
  std::size_t max_attempts_factor = 1000;
  std::pair<double, double> bin_thresholds{-1.0 / 3.0, 1.0 / 3.0};
};

namespace detail {

struct G1noSetup {
  ClassCounts counts;
  std::vector<std::size_t> minority_rows;
  std::size_t needed = 0;
};

inline G1noSetup g1no_setup(const Dataset& train) {
  train.validate();
  G1noSetup s;
  s.counts = class_counts(train);
  s.minority_rows = train.indices_of(s.counts.minority_label);
  s.needed = s.counts.majority_count - s.counts.minority_count;
  return s;
}

inline SyntheticBatch g1no_generate(const Dataset& train, const G1noSetup& setup, FeatureStats stats,
                                    std::uint64_t seed, const G1noConfig& config, Algorithm tag) {
  if (!(config.filter_fraction > 0.0 && config.filter_fraction <= 1.0))
    throw ConfigError("filter fraction must lie in (0, 1]");

  std::vector<std::size_t> all(train.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> reference = all, held_back;
  if (config.filter_fraction < 1.0) {
    auto [first, second] = stratified_partition(train, all, config.filter_fraction, derive_seed(seed, 21));
    reference = std::move(first);
    held_back = std::move(second);
  }
  const Dataset ref = subset(train, reference);
  if (ref.count(setup.counts.minority_label) == 0) throw DataError("1NN filter reference set has no minority samples");
  const NeighborIndex filter(ref.samples, ref.labels);

  std::optional<double> filter_accuracy;
  if (!held_back.empty()) {
    std::size_t correct = 0;
    for (std::size_t r : held_back)
      if (filter.nn1_classify(train.row(r)) == train.labels[r]) ++correct;
    filter_accuracy = static_cast<double>(correct) / static_cast<double>(held_back.size());
  }

  RowSet existing;
  for (std::size_t i = 0; i < train.size(); ++i) existing.insert(train.row(i));

  const int minority = setup.counts.minority_label;
  GrngSpec spec{setup.needed, std::move(stats), config.max_attempts_factor};
  auto attach = [&](SyntheticBatch& b) {
    b.filter_reference = reference;
    b.filter_validation_accuracy = filter_accuracy;
  };
  try {
    SyntheticBatch batch = grng(
        spec, [&](std::span<const double> x) { return filter.nn1_classify(x) == minority; },
        [&](std::span<const double> x) { return existing.contains(x); }, derive_seed(seed, 22), tag);
    batch.seed = seed;
    attach(batch);
    return batch;
  } catch (const BudgetExhausted& e) {
    SyntheticBatch partial = e.partial();
    partial.seed = seed;
    attach(partial);
    throw BudgetExhausted(std::move(partial), e.requested());
  }
}

inline SyntheticBatch empty_batch(const Dataset& train, Algorithm tag, std::uint64_t seed) {
  SyntheticBatch b;
  b.algorithm = tag;
  b.seed = seed;
  b.samples = Matrix(0, train.num_features());
  return b;
}

}  // namespace detail

/// Gaussian generator over minority mean/std with 1NN rejection; produces
/// m_max - m_min samples so that appending them balances the classes.
inline SyntheticBatch g1no(const Dataset& train, std::uint64_t seed, const G1noConfig& config = {}) {
  const auto setup = detail::g1no_setup(train);
  if (setup.needed == 0) return detail::empty_batch(train, Algorithm::g1no, seed);
  FeatureStats stats = feature_stats(train.samples.select_rows(setup.minority_rows));
  return detail::g1no_generate(train, setup, std::move(stats), seed, config, Algorithm::g1no);
}

/// Silhouette weights for the minority rows of `train`: computed against the
/// extremes of the whole training set, then restricted to the minority and
/// normalised to sum to 1.
inline std::vector<double> minority_gourmet_weights(const Dataset& train, const SilhouetteReport& report,
                                                   std::span<const std::size_t> minority_rows) {
  if (report.coefficients.size() != train.size()) throw DataError("silhouette report does not match the training set");
  std::vector<double> own;
  for (std::size_t r : minority_rows) own.push_back(report.coefficients[r]);
  const auto [lo, hi] = std::minmax_element(own.begin(), own.end());
  if (!(*hi > *lo)) throw DegenerateWeighting("degenerate weighting: minority silhouettes are all identical");
  const GourmetWeights all = gourmet_weights(report);
  std::vector<double> w;
  for (std::size_t r : minority_rows) w.push_back(all.weights[r]);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

inline SyntheticBatch g1no_gourmet(const Dataset& train, std::uint64_t seed, const G1noConfig& config = {}) {
  const auto setup = detail::g1no_setup(train);
  if (setup.needed == 0) return detail::empty_batch(train, Algorithm::g1no_gourmet, seed);
  const SilhouetteReport report = silhouette_report(train, config.bin_thresholds);
  const auto weights = minority_gourmet_weights(train, report, setup.minority_rows);
  FeatureStats stats = weighted_feature_stats(train.samples.select_rows(setup.minority_rows), weights);
  return detail::g1no_generate(train, setup, std::move(stats), seed, config, Algorithm::g1no_gourmet);
}

// ---------------------------------------------------------------- rebalancing

struct RebalanceConfig {
  Algorithm algorithm = Algorithm::g1no;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  G1noConfig g1no;
};

struct RebalanceResult {
  Dataset balanced;
  SyntheticBatch batch;
  int minority_label = 0;
};

/// Generates m_max - m_min minority samples and appends them to `train`.
/// A balanced input comes back unchanged with an empty batch.
inline RebalanceResult rebalance(const Dataset& train, const RebalanceConfig& config) {
  const ClassCounts counts = class_counts(train);
  const std::size_t needed = counts.majority_count - counts.minority_count;
  RebalanceResult out{train, detail::empty_batch(train, config.algorithm, config.seed), counts.minority_label};
  if (needed == 0) return out;
  switch (config.algorithm) {
    case Algorithm::smote:
      out.batch = smote(train.samples.select_rows(train.indices_of(counts.minority_label)), config.k, needed, config.seed);
      break;
    case Algorithm::adasyn:
      out.batch = adasyn(train, config.k, needed, config.seed);
      break;
    case Algorithm::g1no:
      out.batch = g1no(train, config.seed, config.g1no);
      break;
    case Algorithm::g1no_gourmet:
      out.batch = g1no_gourmet(train, config.seed, config.g1no);
      break;
  }
  append_rows(out.balanced, out.batch.samples, counts.minority_label);
  return out;
}

}  // namespace rebal
