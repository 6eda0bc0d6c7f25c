#include "frem/gradcheck.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "frem/eipm.hpp"
#include "frem/net.hpp"
#include "frem/rng.hpp"
#include "frem/trainer.hpp"

namespace frem {

namespace {

constexpr double kStep = 1e-5;

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

// Central finite differences of fn over each coordinate of x.
Eigen::VectorXd finite_difference(std::function<double(const Eigen::VectorXd&)> fn,
                                  Eigen::VectorXd x) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x(i);
    x(i) = saved + kStep;
    const double up = fn(x);
    x(i) = saved - kStep;
    const double down = fn(x);
    x(i) = saved;
    grad(i) = (up - down) / (2.0 * kStep);
  }
  return grad;
}

double check_eipm(std::uint64_t seed, WeightKind kind, double corruption) {
  Rng rng = Rng(seed).derive(kind == WeightKind::kDp ? 0x6470ULL : 0x656fULL);
  const Eigen::Index n = 8, m = 3;
  Eigen::MatrixXd Z(n, m);
  Eigen::VectorXd S(n), Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S(i) = rng.normal();
    Y(i) = (i < 5) ? 1.0 : 0.0;  // keep at least two positives
    for (Eigen::Index c = 0; c < m; ++c) Z(i, c) = rng.normal();
  }
  const SmoothingKernelSpec spec_s{SmoothingFamily::kRbf, 0.5};
  const MmdKernelSpec spec_z{1.0};

  const auto value_at = [&](const Eigen::VectorXd& flat) {
    const Eigen::MatrixXd z = Eigen::Map<const Eigen::MatrixXd>(flat.data(), n, m);
    return kind == WeightKind::kDp ? eipm_proposed(z, S, spec_s, spec_z).value
                                   : eipm_eo(z, S, Y, spec_s, spec_z).value;
  };

  Eigen::MatrixXd analytic = eipm_gradient(Z, S, spec_s, spec_z, kind, &Y);
  analytic(0, 0) += corruption;
  const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(Z.data(), n * m);
  const Eigen::VectorXd numeric = finite_difference(value_at, flat);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    worst = std::max(worst, relative_error(Eigen::Map<const Eigen::VectorXd>(
                                               analytic.data(), n * m)(i),
                                           numeric(i)));
  }
  return worst;
}

double check_reg_gdp(std::uint64_t seed, double corruption) {
  Rng rng = Rng(seed).derive(0x726567ULL);
  const Eigen::Index n = 12;
  Eigen::VectorXd pred(n), S(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pred(i) = rng.normal();
    S(i) = rng.normal();
  }
  const SmoothingKernelSpec spec_s{SmoothingFamily::kRbf, 0.5};

  Eigen::VectorXd analytic = reg_gdp_penalty(pred, S, spec_s).second;
  analytic(0) += corruption;
  const Eigen::VectorXd numeric = finite_difference(
      [&](const Eigen::VectorXd& p) { return reg_gdp_penalty(p, S, spec_s).first; }, pred);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    worst = std::max(worst, relative_error(analytic(i), numeric(i)));
  }
  return worst;
}

// Composite loss over a small network: supervised + lambda * EIPM via d_z.
double check_network(std::uint64_t seed, double corruption) {
  Rng rng = Rng(seed).derive(0x6e6574ULL);
  const Eigen::Index n = 10, d = 2, hidden = 4, m = 3;
  const double lambda = 0.7;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd Y(n), S(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S(i) = rng.normal();
    Y(i) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    for (Eigen::Index c = 0; c < d; ++c) X(i, c) = rng.normal();
  }
  const SmoothingKernelSpec spec_s{SmoothingFamily::kRbf, 0.5};
  const MmdKernelSpec spec_z{1.0};
  Network net = init_network(d, hidden, m, seed);

  const auto loss_of = [&](const Network& candidate) {
    const ForwardCache cache = forward(candidate, X);
    const double sup = supervised_loss(cache.yhat, Y, Task::kClassification).first;
    return sup + lambda * eipm_proposed(cache.z, S, spec_s, spec_z).value;
  };

  const ForwardCache cache = forward(net, X);
  auto [sup, d_yhat] = supervised_loss(cache.yhat, Y, Task::kClassification);
  const WeightMatrix A = centered_weight_matrix(spec_s, S);
  const Eigen::MatrixXd d_z = lambda * eipm_value_and_gradient(cache.z, A, spec_z).grad;
  Gradients grads = backward(net, cache, d_yhat, d_z);
  grads.encoder[0].weight(0, 0) += corruption;

  double worst = 0.0;
  const auto check_block = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& analytic) {
    for (Eigen::Index r = 0; r < param.rows(); ++r) {
      for (Eigen::Index c = 0; c < param.cols(); ++c) {
        const double saved = param(r, c);
        param(r, c) = saved + kStep;
        const double up = loss_of(net);
        param(r, c) = saved - kStep;
        const double down = loss_of(net);
        param(r, c) = saved;
        worst = std::max(worst, relative_error(analytic(r, c), (up - down) / (2.0 * kStep)));
      }
    }
  };
  const auto check_vector = [&](Eigen::VectorXd& param, const Eigen::VectorXd& analytic) {
    for (Eigen::Index r = 0; r < param.size(); ++r) {
      const double saved = param(r);
      param(r) = saved + kStep;
      const double up = loss_of(net);
      param(r) = saved - kStep;
      const double down = loss_of(net);
      param(r) = saved;
      worst = std::max(worst, relative_error(analytic(r), (up - down) / (2.0 * kStep)));
    }
  };
  for (std::size_t l = 0; l < net.encoder.size(); ++l) {
    check_block(net.encoder[l].weight, grads.encoder[l].weight);
    check_vector(net.encoder[l].bias, grads.encoder[l].bias);
  }
  check_block(net.head.weight, grads.head.weight);
  check_vector(net.head.bias, grads.head.bias);
  return worst;
}

}  // namespace

GradCheckReport run_gradient_checks(std::uint64_t seed, int num_seeds, double corruption) {
  GradCheckReport report;
  double eipm_dp = 0.0, eipm_eo_err = 0.0, reg = 0.0, network = 0.0;
  for (int s = 0; s < num_seeds; ++s) {
    const std::uint64_t trial = seed + static_cast<std::uint64_t>(s);
    eipm_dp = std::max(eipm_dp, check_eipm(trial, WeightKind::kDp, corruption));
    eipm_eo_err = std::max(eipm_eo_err, check_eipm(trial, WeightKind::kEo, corruption));
    reg = std::max(reg, check_reg_gdp(trial, corruption));
    network = std::max(network, check_network(trial, corruption));
  }
  report.components = {{"eipm_gradient_dp", eipm_dp},
                       {"eipm_gradient_eo", eipm_eo_err},
                       {"reg_gdp_penalty", reg},
                       {"network_backward", network}};
  return report;
}

}  // namespace frem
