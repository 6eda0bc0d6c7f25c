#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "frem/data.hpp"

namespace frem {

// One-dimensional synthetic design: (S, X1, X2) is a trivariate Gaussian with
// unit marginals, Corr(S, X1) = rho, X2 independent; the encoder is the unit
// vector (w1, w2), so Z ~ N(0,1) and Z | S=s ~ N(w1 rho s, 1 - w1^2 rho^2).
struct GaussianModel1d {
  double rho = 0.4;
  double w1 = 0.0;
  double w2 = 0.0;

  void validate() const;
};

// Multi-dimensional design: (S, Z) Gaussian with Var(S)=1, Var(Z_k)=1/m,
// Cov(S, Z_k)=rho/sqrt(m); positive definite iff 0 <= rho < 1/sqrt(m).
struct GaussianModelMulti {
  int m = 1;
  double rho = 0.0;

  void validate() const;
};

// E kappa(X1, X2) for X1 ~ N(mu1, Sigma1), X2 ~ N(mu2, Sigma2) under the
// unit-scale RBF kernel:
//   1/sqrt(det(Sigma1+Sigma2+I)) * exp(-1/2 (mu1-mu2)^T (Sigma1+Sigma2+I)^-1 (mu1-mu2)).
double expected_gaussian_kernel(const Eigen::Ref<const Eigen::VectorXd>& mu1,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma1,
                                const Eigen::Ref<const Eigen::VectorXd>& mu2,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma2);

// Exact MMD between P_{Z|S=s} and P_Z for the designs above (sigma = 1).
double true_ipm_conditional(const GaussianModel1d& model, double s);
double true_ipm_conditional(const GaussianModelMulti& model, double s);

// Monte-Carlo average of the conditional IPM over S ~ N(0,1).
double true_eipm_monte_carlo(const GaussianModel1d& model, int num_draws, std::uint64_t seed);
double true_eipm_monte_carlo(const GaussianModelMulti& model, int num_draws, std::uint64_t seed);

inline constexpr int kTrueEipmDefaultDraws = 100000;

// Draw n samples; X is n x 2 and the representation Z = X w is formed by the
// caller.
SampleBatch sample_synthetic_1d(const GaussianModel1d& model, int n, std::uint64_t seed);

// Draw n samples; the representation is sampled directly, so X stores Z.
SampleBatch sample_synthetic_multi(const GaussianModelMulti& model, int n, std::uint64_t seed);

}  // namespace frem
