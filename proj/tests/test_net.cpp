#include "frem/net.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "frem/model_io.hpp"
#include "frem/rng.hpp"

namespace frem {
namespace {

TEST(Selu, ClosedFormValues) {
  EXPECT_EQ(selu(0.0), 0.0);
  EXPECT_NEAR(selu(1.0), kSeluLambda, 1e-12);
  EXPECT_NEAR(selu(-50.0), -kSeluLambda * kSeluAlpha, 1e-12);
  // continuity at zero
  EXPECT_NEAR(selu(1e-12), selu(-1e-12), 1e-11);
}

TEST(Init, DeterministicPerSeed) {
  const Network a = init_network(3, 8, 4, 99);
  const Network b = init_network(3, 8, 4, 99);
  const Network c = init_network(3, 8, 4, 100);
  EXPECT_TRUE(a.encoder[0].weight.isApprox(b.encoder[0].weight, 0.0));
  EXPECT_TRUE(a.encoder[1].weight.isApprox(b.encoder[1].weight, 0.0));
  EXPECT_TRUE(a.head.weight.isApprox(b.head.weight, 0.0));
  EXPECT_FALSE(a.encoder[0].weight.isApprox(c.encoder[0].weight, 0.0));
}

TEST(Init, ParameterCount) {
  const Network net = init_network(2, 50, 50, 1);
  // 2*50+50 + 50*50+50 + 50*1+1
  EXPECT_EQ(net.parameter_count(), 2 * 50 + 50 + 50 * 50 + 50 + 50 * 1 + 1);
}

TEST(Init, LeCunVariance) {
  const Network net = init_network(50, 50, 50, 7);
  for (const auto* layer : {&net.encoder[0], &net.encoder[1]}) {
    const double var = layer->weight.array().square().mean();
    EXPECT_NEAR(var, 1.0 / 50.0, 0.2 / 50.0);
    EXPECT_EQ(layer->bias.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Forward, ZeroNetworkMapsToZero) {
  Network net = init_network(3, 4, 2, 1);
  net.encoder[0].weight.setZero();
  net.encoder[1].weight.setZero();
  net.head.weight.setZero();

  Eigen::MatrixXd X(5, 3);
  X.setRandom();
  const ForwardCache cache = forward(net, X);
  EXPECT_EQ(cache.z.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(cache.yhat.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, SingleSampleMatchesBatchedRow) {
  const Network net = init_network(4, 6, 3, 11);
  Rng rng(12);
  Eigen::MatrixXd X(7, 4);
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index c = 0; c < 4; ++c) X(i, c) = rng.normal();
  }
  const ForwardCache batched = forward(net, X);
  for (Eigen::Index i = 0; i < 7; ++i) {
    const ForwardCache single = forward(net, X.row(i));
    EXPECT_TRUE(single.z.row(0).isApprox(batched.z.row(i), 1e-14));
    EXPECT_NEAR(single.yhat(0), batched.yhat(i), 1e-14);
  }
}

TEST(Forward, ReportsNonFiniteLayer) {
  Network net = init_network(2, 3, 2, 13);
  net.encoder[1].weight(0, 0) = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 2);
  try {
    forward(net, X);
    FAIL() << "expected diagnostic";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos);
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  const Network net = init_network(3, 5, 2, 17);
  Eigen::MatrixXd X(4, 3);
  X.setRandom();
  const ForwardCache cache = forward(net, X);
  const Gradients grads = backward(net, cache, Eigen::VectorXd::Zero(4),
                                   Eigen::MatrixXd::Zero(4, 2));
  EXPECT_EQ(grads.head.weight.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(grads.encoder[0].weight.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(grads.encoder[1].weight.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, HeadGradientIgnoresRepresentationPath) {
  const Network net = init_network(3, 5, 2, 19);
  Eigen::MatrixXd X(4, 3);
  X.setRandom();
  const ForwardCache cache = forward(net, X);
  Eigen::VectorXd d_yhat(4);
  d_yhat.setRandom();
  Eigen::MatrixXd d_z(4, 2);
  d_z.setRandom();

  const Gradients with_dz = backward(net, cache, d_yhat, d_z);
  const Gradients without_dz = backward(net, cache, d_yhat, Eigen::MatrixXd::Zero(4, 2));
  EXPECT_TRUE(with_dz.head.weight.isApprox(without_dz.head.weight, 0.0));
  EXPECT_TRUE(with_dz.head.bias.isApprox(without_dz.head.bias, 0.0));
  EXPECT_FALSE(with_dz.encoder[1].weight.isApprox(without_dz.encoder[1].weight, 0.0));
}

TEST(Adam, ZeroGradientKeepsParameters) {
  Network net = init_network(2, 3, 2, 23);
  const Network before = net;
  OptimizerState opt = OptimizerState::like(net);

  Gradients zero;
  zero.encoder.resize(2);
  for (std::size_t l = 0; l < 2; ++l) {
    zero.encoder[l].weight = Eigen::MatrixXd::Zero(net.encoder[l].weight.rows(),
                                                   net.encoder[l].weight.cols());
    zero.encoder[l].bias = Eigen::VectorXd::Zero(net.encoder[l].bias.size());
  }
  zero.head.weight = Eigen::MatrixXd::Zero(net.head.weight.rows(), net.head.weight.cols());
  zero.head.bias = Eigen::VectorXd::Zero(1);

  adam_step(opt, net, zero, 0.01, 0.0);
  EXPECT_TRUE(net.encoder[0].weight.isApprox(before.encoder[0].weight, 0.0));
  EXPECT_TRUE(net.head.weight.isApprox(before.head.weight, 0.0));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Network net = init_network(2, 3, 2, 29);
  const Network before = net;
  OptimizerState opt = OptimizerState::like(net);

  Gradients grads;
  grads.encoder.resize(2);
  Rng rng(31);
  for (std::size_t l = 0; l < 2; ++l) {
    grads.encoder[l].weight = net.encoder[l].weight.unaryExpr(
        [&](double) { return rng.normal(); });
    grads.encoder[l].bias = net.encoder[l].bias.unaryExpr([&](double) { return rng.normal(); });
  }
  grads.head.weight = net.head.weight.unaryExpr([&](double) { return rng.normal(); });
  grads.head.bias = Eigen::VectorXd::Constant(1, rng.normal());

  const double lr = 0.001;
  adam_step(opt, net, grads, lr, 0.0);
  for (Eigen::Index r = 0; r < net.encoder[0].weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < net.encoder[0].weight.cols(); ++c) {
      const double displacement = net.encoder[0].weight(r, c) - before.encoder[0].weight(r, c);
      const double expected = -lr * (grads.encoder[0].weight(r, c) > 0 ? 1.0 : -1.0);
      EXPECT_NEAR(displacement, expected, lr * 1e-5);
    }
  }
}

TEST(Adam, IdenticalStreamsStayIdentical) {
  Network a = init_network(2, 4, 3, 37);
  Network b = a;
  OptimizerState opt_a = OptimizerState::like(a);
  OptimizerState opt_b = OptimizerState::like(b);

  Rng rng(41);
  for (int step = 0; step < 5; ++step) {
    Gradients grads;
    grads.encoder.resize(2);
    for (std::size_t l = 0; l < 2; ++l) {
      grads.encoder[l].weight =
          a.encoder[l].weight.unaryExpr([&](double) { return rng.normal(); });
      grads.encoder[l].bias = a.encoder[l].bias.unaryExpr([&](double) { return rng.normal(); });
    }
    grads.head.weight = a.head.weight.unaryExpr([&](double) { return rng.normal(); });
    grads.head.bias = Eigen::VectorXd::Constant(1, rng.normal());
    adam_step(opt_a, a, grads, 0.001, 0.01);
    adam_step(opt_b, b, grads, 0.001, 0.01);
  }
  EXPECT_TRUE(a.encoder[0].weight.isApprox(b.encoder[0].weight, 0.0));
  EXPECT_TRUE(a.head.weight.isApprox(b.head.weight, 0.0));
}

TEST(ModelIo, RoundTripIsExact) {
  const Network net = init_network(3, 6, 4, 43);
  ScalingParams scaling;
  scaling.x_min = Eigen::VectorXd::Constant(3, -1.0);
  scaling.x_max = Eigen::VectorXd::Constant(3, 2.0);
  scaling.s_min = 0.25;
  scaling.s_max = 0.75;

  const std::string path = ::testing::TempDir() + "/model_roundtrip.json";
  save_model({net, scaling}, path);
  const ModelBundle loaded = load_model(path);

  EXPECT_EQ(loaded.net.dims, net.dims);
  EXPECT_TRUE(loaded.net.encoder[0].weight.isApprox(net.encoder[0].weight, 0.0));
  EXPECT_TRUE(loaded.net.encoder[1].weight.isApprox(net.encoder[1].weight, 0.0));
  EXPECT_TRUE(loaded.net.head.weight.isApprox(net.head.weight, 0.0));
  EXPECT_EQ(loaded.scaling.s_min, scaling.s_min);
  EXPECT_TRUE(loaded.scaling.x_max.isApprox(scaling.x_max, 0.0));
}

}  // namespace
}  // namespace frem
