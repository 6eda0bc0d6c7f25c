#include "frem/net.hpp"

#include <cmath>
#include <stdexcept>

#include "frem/rng.hpp"

namespace frem {

double selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

double selu_derivative(double x) {
  return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

namespace {

Eigen::MatrixXd apply_selu(const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([](double x) { return selu(x); });
}

Eigen::MatrixXd selu_grad(const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([](double x) { return selu_derivative(x); });
}

DenseLayer init_layer(Eigen::Index in, Eigen::Index out, Rng rng) {
  DenseLayer layer;
  const double stddev = 1.0 / std::sqrt(static_cast<double>(in));
  layer.weight.resize(in, out);
  for (Eigen::Index r = 0; r < in; ++r) {
    for (Eigen::Index c = 0; c < out; ++c) layer.weight(r, c) = stddev * rng.normal();
  }
  layer.bias = Eigen::VectorXd::Zero(out);
  return layer;
}

void check_layer_finite(const Eigen::MatrixXd& values, const std::string& name) {
  if (!values.allFinite()) {
    throw std::runtime_error("forward: non-finite activations at " + name);
  }
}

DenseLayer zeros_like(const DenseLayer& layer) {
  return {Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
          Eigen::VectorXd::Zero(layer.bias.size())};
}

}  // namespace

Eigen::Index Network::parameter_count() const {
  Eigen::Index count = 0;
  for (const auto& layer : encoder) count += layer.weight.size() + layer.bias.size();
  return count + head.weight.size() + head.bias.size();
}

Network init_network(Eigen::Index input_dim, Eigen::Index hidden_dim, Eigen::Index rep_dim,
                     std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || rep_dim < 1) {
    throw std::invalid_argument("init_network: all dimensions must be >= 1");
  }
  const Rng base(seed);
  Network net;
  net.dims = {input_dim, hidden_dim, rep_dim};
  net.encoder.push_back(init_layer(input_dim, hidden_dim, base.derive(1)));
  net.encoder.push_back(init_layer(hidden_dim, rep_dim, base.derive(2)));
  net.head = init_layer(rep_dim, 1, base.derive(3));
  return net;
}

ForwardCache forward(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() != net.dims[0]) {
    throw std::invalid_argument("forward: input has " + std::to_string(X.cols()) +
                                " features, network expects " + std::to_string(net.dims[0]));
  }
  if (!X.allFinite()) throw std::invalid_argument("forward: non-finite input");

  ForwardCache cache;
  cache.input = X;
  cache.pre1 = (X * net.encoder[0].weight).rowwise() + net.encoder[0].bias.transpose();
  check_layer_finite(cache.pre1, "encoder layer 1");
  cache.hidden = apply_selu(cache.pre1);
  cache.pre2 = (cache.hidden * net.encoder[1].weight).rowwise() + net.encoder[1].bias.transpose();
  check_layer_finite(cache.pre2, "encoder layer 2");
  cache.z = apply_selu(cache.pre2);
  cache.yhat = (cache.z * net.head.weight).col(0) + Eigen::VectorXd::Constant(X.rows(), net.head.bias(0));
  check_layer_finite(cache.yhat, "head");
  return cache;
}

Gradients backward(const Network& net, const ForwardCache& cache,
                   const Eigen::Ref<const Eigen::VectorXd>& d_yhat,
                   const Eigen::Ref<const Eigen::MatrixXd>& d_z) {
  const Eigen::Index n = cache.input.rows();
  if (d_yhat.size() != n || d_z.rows() != n || d_z.cols() != net.dims[2]) {
    throw std::invalid_argument("backward: upstream gradient shapes do not match the cache");
  }

  Gradients grads;
  grads.head.weight = cache.z.transpose() * d_yhat;
  grads.head.bias = Eigen::VectorXd::Constant(1, d_yhat.sum());

  const Eigen::MatrixXd dz_total = d_z + d_yhat * net.head.weight.col(0).transpose();
  const Eigen::MatrixXd d_pre2 = dz_total.cwiseProduct(selu_grad(cache.pre2));
  const Eigen::MatrixXd d_hidden = d_pre2 * net.encoder[1].weight.transpose();
  const Eigen::MatrixXd d_pre1 = d_hidden.cwiseProduct(selu_grad(cache.pre1));

  grads.encoder.resize(2);
  grads.encoder[1].weight = cache.hidden.transpose() * d_pre2;
  grads.encoder[1].bias = d_pre2.colwise().sum();
  grads.encoder[0].weight = cache.input.transpose() * d_pre1;
  grads.encoder[0].bias = d_pre1.colwise().sum();
  return grads;
}

OptimizerState OptimizerState::like(const Network& net) {
  OptimizerState state;
  for (const auto& layer : net.encoder) {
    state.m_encoder.push_back(zeros_like(layer));
    state.v_encoder.push_back(zeros_like(layer));
  }
  state.m_head = zeros_like(net.head);
  state.v_head = zeros_like(net.head);
  return state;
}

namespace {

void adam_update_block(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, Eigen::MatrixXd& m,
                       Eigen::MatrixXd& v, const OptimizerState& state, double lr,
                       double weight_decay, double bias1, double bias2) {
  m = state.beta1 * m + (1.0 - state.beta1) * grad;
  v = state.beta2 * v.array().matrix() + (1.0 - state.beta2) * grad.array().square().matrix();
  const Eigen::ArrayXXd m_hat = m.array() / bias1;
  const Eigen::ArrayXXd v_hat = v.array() / bias2;
  param.array() -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
  param *= (1.0 - lr * weight_decay);
}

void adam_update_vector(Eigen::VectorXd& param, const Eigen::VectorXd& grad, Eigen::VectorXd& m,
                        Eigen::VectorXd& v, const OptimizerState& state, double lr,
                        double weight_decay, double bias1, double bias2) {
  m = state.beta1 * m + (1.0 - state.beta1) * grad;
  v = state.beta2 * v.array().matrix() + (1.0 - state.beta2) * grad.array().square().matrix();
  const Eigen::ArrayXd m_hat = m.array() / bias1;
  const Eigen::ArrayXd v_hat = v.array() / bias2;
  param.array() -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
  param *= (1.0 - lr * weight_decay);
}

}  // namespace

void adam_step(OptimizerState& state, Network& net, const Gradients& grads, double lr,
               double weight_decay) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t l = 0; l < net.encoder.size(); ++l) {
    adam_update_block(net.encoder[l].weight, grads.encoder[l].weight, state.m_encoder[l].weight,
                      state.v_encoder[l].weight, state, lr, weight_decay, bias1, bias2);
    adam_update_vector(net.encoder[l].bias, grads.encoder[l].bias, state.m_encoder[l].bias,
                       state.v_encoder[l].bias, state, lr, weight_decay, bias1, bias2);
  }
  adam_update_block(net.head.weight, grads.head.weight, state.m_head.weight, state.v_head.weight,
                    state, lr, weight_decay, bias1, bias2);
  adam_update_vector(net.head.bias, grads.head.bias, state.m_head.bias, state.v_head.bias, state,
                     lr, weight_decay, bias1, bias2);
}

}  // namespace frem
