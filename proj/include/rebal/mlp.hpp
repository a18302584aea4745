#pragma once

// Fixed-shape binary classifier: n -> 22 -> 22 -> 1, sigmoid output,
// binary cross-entropy loss, plain mini-batch gradient descent.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"
#include "rebal/matrix.hpp"
#include "rebal/rng.hpp"

namespace rebal {

enum class Activation { relu, sigmoid };

inline constexpr std::size_t kHiddenWidth = 22;

struct DenseLayer {
  Matrix weights;  // outputs x inputs
  std::vector<double> bias;

  std::size_t inputs() const noexcept { return weights.cols(); }
  std::size_t outputs() const noexcept { return weights.rows(); }
};

struct MlpModel {
  Activation hidden = Activation::relu;
  std::array<DenseLayer, 3> layers;

  std::size_t input_size() const noexcept { return layers[0].inputs(); }

  std::array<std::size_t, 4> layer_sizes() const noexcept {
    return {layers[0].inputs(), layers[0].outputs(), layers[1].outputs(), layers[2].outputs()};
  }

  /// Enforces the n-22-22-1 shape.
  void validate() const {
    const auto s = layer_sizes();
    if (s[0] == 0 || s[1] != kHiddenWidth || s[2] != kHiddenWidth || s[3] != 1)
      throw DataError("MLP must have shape n-22-22-1");
    if (layers[1].inputs() != s[1] || layers[2].inputs() != s[2]) throw DataError("MLP layer shapes are inconsistent");
    for (const auto& l : layers)
      if (l.bias.size() != l.outputs()) throw DataError("MLP bias length does not match layer width");
  }

  /// All weights and biases zero (predicts 0.5 everywhere).
  static MlpModel zeros(std::size_t inputs, Activation hidden = Activation::relu) {
    MlpModel m;
    m.hidden = hidden;
    const std::array<std::size_t, 4> s{inputs, kHiddenWidth, kHiddenWidth, 1};
    for (std::size_t l = 0; l < 3; ++l) m.layers[l] = {Matrix(s[l + 1], s[l], 0.0), std::vector<double>(s[l + 1], 0.0)};
    m.validate();
    return m;
  }

  /// Glorot-uniform weights in [-sqrt(6/(fan_in+fan_out)), +...], zero biases.
  static MlpModel initialize(std::size_t inputs, Activation hidden, std::uint64_t seed) {
    MlpModel m = zeros(inputs, hidden);
    Rng rng(seed);
    for (auto& layer : m.layers) {
      const double limit =
          std::sqrt(6.0 / static_cast<double>(layer.inputs() + layer.outputs()));
      for (std::size_t r = 0; r < layer.outputs(); ++r)
        for (std::size_t c = 0; c < layer.inputs(); ++c) layer.weights(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    }
    return m;
  }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.outputs() * (l.inputs() + 1);
    return n;
  }
};

struct MlpConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 10;
  double learning_rate = 0.01;
  Activation hidden = Activation::relu;
  std::uint64_t seed = 0;
};

/// Per-epoch losses. `train_loss` (TLC) and `validation_loss` (VLC) are full
/// passes at the end of each epoch; `running_train_loss` is the mean batch
/// loss observed while the epoch was running.
struct TrainingTrace {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::vector<double> running_train_loss;
};

namespace detail {

inline double activate(Activation a, double x) {
  return a == Activation::relu ? (x > 0.0 ? x : 0.0) : 1.0 / (1.0 + std::exp(-x));
}

/// Derivative expressed through the activation output.
inline double activation_slope(Activation a, double pre, double out) {
  return a == Activation::relu ? (pre > 0.0 ? 1.0 : 0.0) : out * (1.0 - out);
}

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// log(1 + e^z) without overflow.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct ForwardCache {
  std::array<std::vector<double>, 2> pre;
  std::array<std::vector<double>, 2> out;
  double logit = 0.0;
};

inline void dense(const DenseLayer& layer, std::span<const double> in, std::vector<double>& pre) {
  pre.resize(layer.outputs());
  for (std::size_t r = 0; r < layer.outputs(); ++r) {
    const auto w = layer.weights.row(r);
    double v = layer.bias[r];
    for (std::size_t c = 0; c < in.size(); ++c) v += w[c] * in[c];
    pre[r] = v;
  }
}

inline void forward(const MlpModel& model, std::span<const double> x, ForwardCache& cache) {
  std::span<const double> in = x;
  for (std::size_t l = 0; l < 2; ++l) {
    dense(model.layers[l], in, cache.pre[l]);
    cache.out[l].resize(cache.pre[l].size());
    for (std::size_t i = 0; i < cache.pre[l].size(); ++i) cache.out[l][i] = activate(model.hidden, cache.pre[l][i]);
    in = cache.out[l];
  }
  const auto& top = model.layers[2];
  const auto w = top.weights.row(0);
  double z = top.bias[0];
  for (std::size_t c = 0; c < in.size(); ++c) z += w[c] * in[c];
  cache.logit = z;
}

/// Binary cross-entropy from the logit: softplus(z) - y z.
inline double bce_from_logit(double z, double y) { return softplus(z) - y * z; }

}  // namespace detail

/// Output-layer logit for one sample.
inline double mlp_logit(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_size()) throw DataError("sample dimensionality does not match the model");
  detail::ForwardCache cache;
  detail::forward(model, x, cache);
  return cache.logit;
}

/// Probability of the positive class, kept strictly inside (0, 1).
inline double mlp_predict(const MlpModel& model, std::span<const double> x) {
  const double p = detail::sigmoid(mlp_logit(model, x));
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(p, lo, hi);
}

inline std::vector<double> mlp_predict(const MlpModel& model, const Matrix& x) {
  std::vector<double> p(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) p[i] = mlp_predict(model, x.row(i));
  return p;
}

/// Gradient of the mean loss, same shapes as the model layers.
struct MlpGradient {
  std::array<DenseLayer, 3> layers;

  static MlpGradient like(const MlpModel& m) {
    MlpGradient g;
    for (std::size_t l = 0; l < 3; ++l)
      g.layers[l] = {Matrix(m.layers[l].outputs(), m.layers[l].inputs(), 0.0),
                     std::vector<double>(m.layers[l].outputs(), 0.0)};
    return g;
  }
};

/// Mean binary cross-entropy over `rows` of `x` with targets `y` (0 or 1),
/// accumulating its analytic gradient into `grad` (which is overwritten).
inline double mlp_loss_and_gradient(const MlpModel& model, const Matrix& x, std::span<const double> y,
                                    std::span<const std::size_t> rows, MlpGradient& grad) {
  if (rows.empty()) throw DataError("empty batch");
  grad = MlpGradient::like(model);
  detail::ForwardCache cache;
  std::vector<double> delta1(kHiddenWidth), delta0(kHiddenWidth);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto in = x.row(r);
    detail::forward(model, in, cache);
    loss += detail::bce_from_logit(cache.logit, y[r]);
    const double dz = (detail::sigmoid(cache.logit) - y[r]) * scale;

    auto& g2 = grad.layers[2];
    const auto& w2 = model.layers[2].weights;
    g2.bias[0] += dz;
    for (std::size_t j = 0; j < kHiddenWidth; ++j) {
      g2.weights(0, j) += dz * cache.out[1][j];
      delta1[j] = dz * w2(0, j) * detail::activation_slope(model.hidden, cache.pre[1][j], cache.out[1][j]);
    }

    auto& g1 = grad.layers[1];
    const auto& w1 = model.layers[1].weights;
    std::fill(delta0.begin(), delta0.end(), 0.0);
    for (std::size_t j = 0; j < kHiddenWidth; ++j) {
      g1.bias[j] += delta1[j];
      for (std::size_t i = 0; i < kHiddenWidth; ++i) {
        g1.weights(j, i) += delta1[j] * cache.out[0][i];
        delta0[i] += delta1[j] * w1(j, i);
      }
    }

    auto& g0 = grad.layers[0];
    for (std::size_t i = 0; i < kHiddenWidth; ++i) {
      const double d = delta0[i] * detail::activation_slope(model.hidden, cache.pre[0][i], cache.out[0][i]);
      g0.bias[i] += d;
      for (std::size_t c = 0; c < in.size(); ++c) g0.weights(i, c) += d * in[c];
    }
  }
  return loss * scale;
}

/// Mean binary cross-entropy over every row.
inline double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw DataError("loss over an empty set");
  detail::ForwardCache cache;
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    detail::forward(model, x.row(r), cache);
    loss += detail::bce_from_logit(cache.logit, y[r]);
  }
  return loss / static_cast<double>(x.rows());
}

/// 1.0 for rows of `positive_class`, 0.0 otherwise.
inline std::vector<double> binary_targets(const Dataset& d, int positive_class) {
  std::vector<double> y(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) y[i] = d.labels[i] == positive_class ? 1.0 : 0.0;
  return y;
}

struct TrainedMlp {
  MlpModel model;
  TrainingTrace trace;
};

inline TrainedMlp mlp_train(const Dataset& train, const Dataset& validation, const MlpConfig& config,
                            int positive_class) {
  if (config.epochs == 0) throw ConfigError("no training performed: epochs must be at least 1");
  if (config.batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
    throw ConfigError("learning rate must be finite and non-negative");
  if (train.size() == 0 || validation.size() == 0) throw DataError("training and validation sets must be non-empty");
  if (train.num_features() != validation.num_features())
    throw DataError("training and validation sets differ in dimensionality");
  class_counts(train);  // both classes present

  const auto y_train = binary_targets(train, positive_class);
  const auto y_val = binary_targets(validation, positive_class);

  TrainedMlp out{MlpModel::initialize(train.num_features(), config.hidden, derive_seed(config.seed, 11)), {}};
  MlpModel& model = out.model;
  Rng shuffler(derive_seed(config.seed, 12));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  MlpGradient grad;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    double running = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      const double batch_loss = mlp_loss_and_gradient(model, train.samples, y_train, batch, grad);
      if (!std::isfinite(batch_loss)) throw TrainingDiverged(epoch, "non-finite batch loss");
      running += batch_loss;
      ++batches;
      for (std::size_t l = 0; l < 3; ++l) {
        auto& layer = model.layers[l];
        const auto& g = grad.layers[l];
        for (std::size_t r = 0; r < layer.outputs(); ++r) {
          layer.bias[r] -= config.learning_rate * g.bias[r];
          auto w = layer.weights.row(r);
          const auto gw = g.weights.row(r);
          for (std::size_t c = 0; c < w.size(); ++c) w[c] -= config.learning_rate * gw[c];
        }
      }
    }
    const double tlc = mlp_loss(model, train.samples, y_train);
    const double vlc = mlp_loss(model, validation.samples, y_val);
    if (!std::isfinite(tlc) || !std::isfinite(vlc)) throw TrainingDiverged(epoch, "non-finite epoch loss");
    out.trace.train_loss.push_back(tlc);
    out.trace.validation_loss.push_back(vlc);
    out.trace.running_train_loss.push_back(running / static_cast<double>(batches));
  }
  return out;
}

}  // namespace rebal
