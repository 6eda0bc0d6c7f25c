#include "frem/trainer.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "frem/rng.hpp"
#include "frem/synth_task.hpp"

namespace frem {
namespace {

SampleBatch scaled_task(int n, std::uint64_t seed) {
  const SampleBatch raw = make_biased_classification(n, 5, 0.6, seed);
  return minmax_scale(raw).first;
}

TEST(SupervisedLoss, RegressionExactFit) {
  Eigen::VectorXd y(4);
  y << 0.5, -1.0, 2.0, 0.0;
  const auto [loss, grad] = supervised_loss(y, y, Task::kRegression);
  EXPECT_EQ(loss, 0.0);
  EXPECT_EQ(grad.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SupervisedLoss, ZeroLogitIsLogTwo) {
  Eigen::VectorXd yhat = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd y(6);
  y << 1, 0, 1, 1, 0, 0;
  const auto [loss, grad] = supervised_loss(yhat, y, Task::kClassification);
  EXPECT_NEAR(loss, std::log(2.0), 1e-12);
}

TEST(SupervisedLoss, RejectsBadLabels) {
  Eigen::VectorXd yhat = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd y(3);
  y << 0.0, 0.5, 1.0;
  EXPECT_THROW(supervised_loss(yhat, y, Task::kClassification), std::invalid_argument);
}

TEST(SupervisedLoss, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  const Eigen::Index n = 7;
  Eigen::VectorXd yhat(n), y_class(n), y_reg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    yhat(i) = rng.normal();
    y_class(i) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    y_reg(i) = rng.normal();
  }
  for (const Task task : {Task::kClassification, Task::kRegression}) {
    const Eigen::VectorXd& y = task == Task::kClassification ? y_class : y_reg;
    const Eigen::VectorXd grad = supervised_loss(yhat, y, task).second;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd up = yhat, down = yhat;
      up(i) += 1e-6;
      down(i) -= 1e-6;
      const double numeric =
          (supervised_loss(up, y, task).first - supervised_loss(down, y, task).first) / 2e-6;
      EXPECT_NEAR(grad(i), numeric, 1e-6 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST(RegGdpPenalty, ConstantPredictionsHitSmoothingFloor) {
  Rng rng(7);
  Eigen::VectorXd S(30);
  for (Eigen::Index i = 0; i < 30; ++i) S(i) = rng.uniform();
  const Eigen::VectorXd pred = Eigen::VectorXd::Constant(30, 0.3);
  const auto [value, grad] = reg_gdp_penalty(pred, S, {SmoothingFamily::kRbf, 0.1});
  EXPECT_LE(value, 1e-4 + 1e-12);
  EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RegGdpPenalty, TracksNonSmoothGdp) {
  Rng rng(11);
  const Eigen::Index n = 200;
  Eigen::VectorXd S(n), pred(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S(i) = rng.uniform();
    pred(i) = std::sin(6.0 * S(i)) + 0.1 * rng.normal();
  }
  const SmoothingKernelSpec spec{SmoothingFamily::kRbf, 0.1};
  const double smooth = reg_gdp_penalty(pred, S, spec).first;
  const double exact = estimate_gdp(pred, S, spec);
  EXPECT_LT(std::abs(smooth - exact), 1e-3);
}

TEST(Trainer, LambdaZeroMatchesNoRegularizer) {
  const SampleBatch data = scaled_task(300, 1);
  TrainConfig config;
  config.lambda = 0.0;
  config.epochs = 3;
  config.batch_size = 64;
  config.gamma = 0.1;
  config.seed = 5;
  config.regularizer = Regularizer::kFrem;
  const TrainResult frem_run = train_frem(data, config);

  config.regularizer = Regularizer::kNone;
  const TrainResult plain_run = train_frem(data, config);

  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_TRUE(frem_run.net.encoder[l].weight.isApprox(plain_run.net.encoder[l].weight, 0.0));
    EXPECT_TRUE(frem_run.net.encoder[l].bias.isApprox(plain_run.net.encoder[l].bias, 0.0));
  }
  EXPECT_TRUE(frem_run.net.head.weight.isApprox(plain_run.net.head.weight, 0.0));
  // The lambda = 0 run still records the fairness values it observed.
  EXPECT_GT(frem_run.history.epochs.back().fairness, 0.0);
  EXPECT_EQ(plain_run.history.epochs.back().fairness, 0.0);
}

TEST(Trainer, DeterministicHistories) {
  const SampleBatch data = scaled_task(250, 2);
  TrainConfig config;
  config.lambda = 1.0;
  config.epochs = 4;
  config.batch_size = 50;
  config.gamma = 0.1;
  config.seed = 11;
  const TrainResult a = train_frem(data, config);
  const TrainResult b = train_frem(data, config);
  ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
  for (std::size_t e = 0; e < a.history.epochs.size(); ++e) {
    EXPECT_EQ(a.history.epochs[e].supervised, b.history.epochs[e].supervised);
    EXPECT_EQ(a.history.epochs[e].fairness, b.history.epochs[e].fairness);
  }
}

TEST(Trainer, TotalLossIdentity) {
  const SampleBatch data = scaled_task(200, 3);
  TrainConfig config;
  config.lambda = 2.5;
  config.epochs = 3;
  config.batch_size = 64;
  config.seed = 13;
  const TrainResult run = train_frem(data, config);
  for (const auto& record : run.history.epochs) {
    EXPECT_NEAR(record.total, record.supervised + config.lambda * record.fairness, 1e-12);
  }
}

TEST(Trainer, EoBatchesWithoutPositivesAreSkipped) {
  SampleBatch data = scaled_task(64, 4);
  data.Y->setZero();
  (*data.Y)(0) = 1.0;  // a single positive: every batch lacks a pair
  TrainConfig config;
  config.lambda = 1.0;
  config.epochs = 2;
  config.batch_size = 32;
  config.fairness = FairnessKind::kEo;
  config.seed = 17;
  const TrainResult run = train_frem(data, config);
  EXPECT_GT(run.history.eo_skipped_batches, 0);
  for (const auto& record : run.history.epochs) EXPECT_EQ(record.fairness, 0.0);
}

TEST(Trainer, AbortsOnNonFiniteLoss) {
  const SampleBatch data = scaled_task(100, 5);
  TrainConfig config;
  config.lambda = 0.0;
  config.epochs = 2;
  config.batch_size = 32;
  config.lr = 1e18;  // drives the parameters to overflow
  config.seed = 19;
  EXPECT_THROW(train_frem(data, config), std::runtime_error);
}

// The paper's qualitative claim on the biased task: a strong penalty at
// least halves the estimated GDP.
TEST(Trainer, StrongPenaltyHalvesGdp) {
  const SampleBatch raw = make_biased_classification(2000, 5, 0.6, 21);
  auto [train_part, test_part] = split(raw, 0.8, 0.2, 21);
  auto [train_scaled, scaling] = minmax_scale(train_part);
  const SampleBatch test_scaled = apply_scaling(test_part, scaling);

  TrainConfig config;
  config.epochs = 40;
  config.batch_size = 256;
  config.gamma = 0.1;
  config.seed = 21;

  config.lambda = 0.0;
  const FairnessReport base = evaluate(train_frem(train_scaled, config).net, test_scaled,
                                       Task::kClassification);
  config.lambda = 5.0;
  const FairnessReport fair = evaluate(train_frem(train_scaled, config).net, test_scaled,
                                       Task::kClassification);
  EXPECT_LT(fair.gdp, 0.5 * base.gdp);
}

TEST(Evaluate, ConstantModelOnConstantLabels) {
  Network net = init_network(3, 4, 2, 23);
  net.encoder[0].weight.setZero();
  net.encoder[1].weight.setZero();
  net.head.weight.setZero();
  net.head.bias(0) = 3.0;  // sigmoid(3) > 0.5

  SampleBatch data;
  data.X = Eigen::MatrixXd::Random(40, 3);
  Rng rng(29);
  data.S.resize(40);
  for (Eigen::Index i = 0; i < 40; ++i) data.S(i) = rng.uniform();
  data.Y.emplace(Eigen::VectorXd::Ones(40));

  const FairnessReport report = evaluate(net, data, Task::kClassification);
  EXPECT_EQ(report.accuracy.value(), 1.0);
  EXPECT_NEAR(report.gdp, 0.0, 1e-12);
}

TEST(Evaluate, MeanPredictorMseEqualsVariance) {
  SampleBatch data;
  data.X = Eigen::MatrixXd::Random(50, 2);
  Rng rng(31);
  data.S.resize(50);
  Eigen::VectorXd y(50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    data.S(i) = rng.uniform();
    y(i) = rng.normal();
  }
  data.Y = y;

  Network net = init_network(2, 3, 2, 31);
  net.encoder[0].weight.setZero();
  net.encoder[1].weight.setZero();
  net.head.weight.setZero();
  net.head.bias(0) = y.mean();

  const FairnessReport report = evaluate(net, data, Task::kRegression);
  const double variance = (y.array() - y.mean()).square().mean();
  EXPECT_NEAR(report.mse.value(), variance, 1e-12);
}

// Report fields are exactly what the metrics module computes on the same tensors.
TEST(Evaluate, CompositionMatchesDirectCalls) {
  const SampleBatch data = scaled_task(150, 6);
  const Network net = init_network(5, 8, 4, 37);
  const FairnessReport report = evaluate(net, data, Task::kClassification);

  const ForwardCache cache = forward(net, data.X);
  const Eigen::VectorXd prob = cache.yhat.unaryExpr(
      [](double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); });
  const SmoothingKernelSpec spec{SmoothingFamily::kRbf, 0.1};
  EXPECT_EQ(report.gdp, estimate_gdp(prob, data.S, spec));
  EXPECT_EQ(report.accuracy.value(), accuracy(prob, *data.Y));
  EXPECT_EQ(report.mi_z_s, estimate_mi_knn(data.S, cache.z, 3));
}

TEST(SelectBandwidth, ReturnsGridMember) {
  const SampleBatch data = scaled_task(300, 7);
  TrainConfig config;
  config.lambda = 1.0;
  config.epochs = 2;
  config.batch_size = 64;
  config.seed = 41;
  const std::vector<double> grid = {0.05, 0.1, 0.2};
  const double chosen = select_bandwidth(data, config, grid);
  EXPECT_TRUE(std::find(grid.begin(), grid.end(), chosen) != grid.end());
}

}  // namespace
}  // namespace frem
