#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace frem {

inline constexpr double kSeluAlpha = 1.6732632423543772;
inline constexpr double kSeluLambda = 1.0507009873554805;

double selu(double x);
double selu_derivative(double x);

struct DenseLayer {
  Eigen::MatrixXd weight;  // in x out
  Eigen::VectorXd bias;    // out
};

// Two-layer selu encoder producing the representation Z plus a linear scalar
// head f(Z). The head emits a raw score; for classification the sigmoid is
// applied in the loss / at evaluation time.
struct Network {
  std::vector<DenseLayer> encoder;
  DenseLayer head;
  std::array<Eigen::Index, 3> dims{};  // input d, hidden width, representation m

  [[nodiscard]] Eigen::Index parameter_count() const;
};

struct ForwardCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd pre1, hidden;
  Eigen::MatrixXd pre2, z;
  Eigen::VectorXd yhat;
};

struct Gradients {
  std::vector<DenseLayer> encoder;
  DenseLayer head;
};

// LeCun-normal weights (variance 1/fan_in, matched to selu), zero biases,
// deterministic per seed.
Network init_network(Eigen::Index input_dim, Eigen::Index hidden_dim, Eigen::Index rep_dim,
                     std::uint64_t seed);

// Returns (Z, yhat) and retains pre-activations for backward.
ForwardCache forward(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& X);

// Back-propagates upstream gradients at yhat (d_yhat) and at the
// representation (d_z, the path the fairness penalty takes to the encoder).
Gradients backward(const Network& net, const ForwardCache& cache,
                   const Eigen::Ref<const Eigen::VectorXd>& d_yhat,
                   const Eigen::Ref<const Eigen::MatrixXd>& d_z);

// Adam with decoupled weight decay.
struct OptimizerState {
  std::vector<DenseLayer> m_encoder, v_encoder;
  DenseLayer m_head, v_head;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState like(const Network& net);
};

void adam_step(OptimizerState& state, Network& net, const Gradients& grads, double lr,
               double weight_decay);

}  // namespace frem
