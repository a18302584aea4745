#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "rebal/mlp.hpp"
#include "support/oracles.hpp"

using namespace rebal;

namespace {

double& parameter(MlpModel& m, std::size_t layer, std::size_t r, std::size_t c) {
  return c == m.layers[layer].inputs() ? m.layers[layer].bias[r] : m.layers[layer].weights(r, c);
}

double gradient_at(const MlpGradient& g, std::size_t layer, std::size_t r, std::size_t c) {
  return c == g.layers[layer].inputs() ? g.layers[layer].bias[r] : g.layers[layer].weights(r, c);
}

void check_gradient(Activation act, std::uint64_t seed) {
  const Matrix x{{0.5, -1.2, 2.0}, {-0.3, 0.8, 0.1}, {1.5, 0.2, -0.7}, {0.0, -2.0, 1.1}};
  const std::vector<double> y{1, 0, 1, 0};
  MlpModel m = MlpModel::initialize(3, act, seed);
  // Non-zero biases so every path is exercised.
  std::mt19937_64 g(seed);
  for (auto& l : m.layers)
    for (auto& b : l.bias) b = oracle::normal(g, 0.0, 0.1);

  std::vector<std::size_t> rows(4);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  MlpGradient grad;
  const double loss = mlp_loss_and_gradient(m, x, y, rows, grad);
  EXPECT_NEAR(loss, mlp_loss(m, x, y), 1e-12);

  const double h = 1e-5;
  std::size_t checked = 0;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t r = 0; r < m.layers[l].outputs(); ++r)
      for (std::size_t c = 0; c <= m.layers[l].inputs(); ++c) {
        double& p = parameter(m, l, r, c);
        const double saved = p;
        p = saved + h;
        const double up = mlp_loss(m, x, y);
        p = saved - h;
        const double down = mlp_loss(m, x, y);
        p = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = gradient_at(grad, l, r, c);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-4});
        EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-4) << "layer " << l << " (" << r << ", " << c << ")";
        ++checked;
      }
  EXPECT_EQ(checked, m.parameter_count());
}

Dataset separable(std::uint64_t seed, std::size_t per_class = 100) {
  std::mt19937_64 g(seed);
  return oracle::blobs(g, per_class, per_class, 4, 5.0);
}

}  // namespace

TEST(Mlp, ShapeIsN22221) {
  const MlpModel m = MlpModel::initialize(11, Activation::relu, 1);
  EXPECT_EQ(m.layer_sizes(), (std::array<std::size_t, 4>{11, 22, 22, 1}));
  EXPECT_EQ(m.parameter_count(), 22u * 12 + 22 * 23 + 23);
  MlpModel bad = m;
  bad.layers[1].weights = Matrix(21, 22);
  EXPECT_THROW(bad.validate(), DataError);
  EXPECT_THROW(mlp_predict(m, std::vector<double>(10, 0.0)), DataError);
}

TEST(Mlp, GlorotBounds) {
  const MlpModel m = MlpModel::initialize(6, Activation::relu, 3);
  for (const auto& l : m.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.inputs() + l.outputs()));
    for (double w : l.weights.values()) EXPECT_LE(std::abs(w), limit);
    for (double b : l.bias) EXPECT_EQ(b, 0.0);
  }
}

TEST(Mlp, ZeroModelPredictsOneHalf) {
  const MlpModel m = MlpModel::zeros(4);
  EXPECT_DOUBLE_EQ(mlp_predict(m, std::vector<double>{1, 2, 3, 4}), 0.5);
}

TEST(Mlp, HandComputedForwardPass) {
  MlpModel m = MlpModel::zeros(1);
  m.layers[0].weights(0, 0) = 2.0;
  m.layers[1].weights(0, 0) = 3.0;
  m.layers[2].weights(0, 0) = 0.5;
  m.layers[2].bias[0] = -1.0;
  // x = 1.5: relu(3) = 3, relu(9) = 9, logit 4.5 - 1.
  EXPECT_DOUBLE_EQ(mlp_logit(m, std::vector<double>{1.5}), 3.5);
  EXPECT_NEAR(mlp_predict(m, std::vector<double>{1.5}), 1.0 / (1.0 + std::exp(-3.5)), 1e-15);
  EXPECT_DOUBLE_EQ(mlp_logit(m, std::vector<double>{-1.0}), -1.0);

  m.hidden = Activation::sigmoid;
  const double h0 = 1.0 / (1.0 + std::exp(-3.0));
  const double h1 = 1.0 / (1.0 + std::exp(-3.0 * h0));
  EXPECT_NEAR(mlp_logit(m, std::vector<double>{1.5}), 0.5 * h1 - 1.0, 1e-15);
}

TEST(Mlp, ExtremeLogitsStayInsideTheOpenInterval) {
  MlpModel m = MlpModel::zeros(2);
  m.layers[2].bias[0] = 40.0;
  const double hi = mlp_predict(m, std::vector<double>{0, 0});
  EXPECT_LT(hi, 1.0);
  EXPECT_GT(hi, 1.0 - 1e-15);
  m.layers[2].bias[0] = -800.0;
  EXPECT_GT(mlp_predict(m, std::vector<double>{0, 0}), 0.0);
}

TEST(MlpGradient, MatchesCentralDifferences) {
  check_gradient(Activation::relu, 5);
  check_gradient(Activation::sigmoid, 6);
}

TEST(MlpTraining, ZeroEpochsIsAnError) {
  const Dataset d = separable(1);
  MlpConfig cfg;
  cfg.epochs = 0;
  try {
    mlp_train(d, d, cfg, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("no training performed"), std::string::npos);
  }
}

TEST(MlpTraining, TraceHasOneEntryPerEpoch) {
  const Dataset d = separable(2);
  MlpConfig cfg;
  cfg.epochs = 7;
  const auto t = mlp_train(d, d, cfg, 1);
  EXPECT_EQ(t.trace.train_loss.size(), 7u);
  EXPECT_EQ(t.trace.validation_loss.size(), 7u);
  EXPECT_EQ(t.trace.running_train_loss.size(), 7u);
  // Validation set identical to the training set: the curves coincide.
  EXPECT_EQ(t.trace.train_loss, t.trace.validation_loss);
}

TEST(MlpTraining, ZeroLearningRateLeavesLossConstant) {
  const Dataset d = separable(3);
  MlpConfig cfg;
  cfg.learning_rate = 0.0;
  const auto t = mlp_train(d, d, cfg, 1);
  for (double l : t.trace.train_loss) EXPECT_EQ(l, t.trace.train_loss.front());
  const MlpModel init = MlpModel::initialize(d.num_features(), cfg.hidden, derive_seed(cfg.seed, 11));
  EXPECT_EQ(t.trace.train_loss.front(), mlp_loss(init, d.samples, binary_targets(d, 1)));
}

TEST(MlpTraining, BitwiseDeterministic) {
  const Dataset d = separable(4);
  MlpConfig cfg;
  cfg.seed = 99;
  const auto a = mlp_train(d, d, cfg, 1), b = mlp_train(d, d, cfg, 1);
  EXPECT_EQ(a.trace.train_loss, b.trace.train_loss);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(a.model.layers[l].weights, b.model.layers[l].weights);
  cfg.seed = 100;
  EXPECT_NE(mlp_train(d, d, cfg, 1).trace.train_loss, a.trace.train_loss);
}

TEST(MlpTraining, LearnsSeparableData) {
  const Dataset train = separable(5), test = separable(6);
  MlpConfig cfg;
  cfg.epochs = 20;
  const auto t = mlp_train(train, test, cfg, 1);
  EXPECT_LT(t.trace.train_loss.back(), t.trace.train_loss.front());
  const auto p = mlp_predict(t.model, test.samples);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) correct += (p[i] >= 0.5) == (test.labels[i] == 1);
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(p.size()), 0.95);
}

TEST(MlpTraining, DivergenceIsReported) {
  Dataset d = separable(7);
  for (double& v : d.samples.row(0)) v = 1e150;
  MlpConfig cfg;
  cfg.learning_rate = 1e200;
  EXPECT_THROW(mlp_train(d, d, cfg, 1), TrainingDiverged);
}

TEST(MlpTraining, InputErrors) {
  const Dataset d = separable(8);
  MlpConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(mlp_train(d, d, cfg, 1), ConfigError);
  cfg = {};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(mlp_train(d, d, cfg, 1), ConfigError);
  Dataset one_class = d;
  for (int& l : one_class.labels) l = 0;
  EXPECT_THROW(mlp_train(one_class, d, {}, 1), DataError);
}
