#include "frem/gaussian_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "frem/rng.hpp"

namespace frem {

namespace {

// Lower Cholesky factor with a positive-semidefiniteness check.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("covariance matrix is not positive definite");
  }
  return llt.matrixL();
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& chol_lower, int n, Rng& rng) {
  const Eigen::Index k = chol_lower.rows();
  Eigen::MatrixXd draws(n, k);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) draws(i, j) = rng.normal();
  }
  return draws * chol_lower.transpose();
}

}  // namespace

void GaussianModel1d::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("GaussianModel1d: rho must lie in [0, 1)");
  }
  if (std::abs(w1 * w1 + w2 * w2 - 1.0) > 1e-12) {
    throw std::invalid_argument("GaussianModel1d: encoder weights must satisfy w1^2 + w2^2 = 1");
  }
}

void GaussianModelMulti::validate() const {
  if (m < 1) throw std::invalid_argument("GaussianModelMulti: m must be >= 1");
  if (!(rho >= 0.0) || rho >= 1.0 / std::sqrt(static_cast<double>(m))) {
    throw std::invalid_argument(
        "GaussianModelMulti: rho must lie in [0, 1/sqrt(m)) for a positive definite covariance");
  }
}

double expected_gaussian_kernel(const Eigen::Ref<const Eigen::VectorXd>& mu1,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma1,
                                const Eigen::Ref<const Eigen::VectorXd>& mu2,
                                const Eigen::Ref<const Eigen::MatrixXd>& sigma2) {
  const Eigen::Index k = mu1.size();
  if (mu2.size() != k || sigma1.rows() != k || sigma1.cols() != k || sigma2.rows() != k ||
      sigma2.cols() != k) {
    throw std::invalid_argument("expected_gaussian_kernel: dimension mismatch");
  }
  for (const auto* sigma : {&sigma1, &sigma2}) {
    if (!sigma->isApprox(sigma->transpose(), 1e-10)) {
      throw std::invalid_argument("expected_gaussian_kernel: covariance must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*sigma, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("expected_gaussian_kernel: covariance must be PSD");
    }
  }

  const Eigen::MatrixXd total = sigma1 + sigma2 + Eigen::MatrixXd::Identity(k, k);
  const Eigen::LLT<Eigen::MatrixXd> llt(total);
  const Eigen::VectorXd diff = mu1 - mu2;
  const double quad = diff.dot(llt.solve(diff));
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::exp(-0.5 * (log_det + quad));
}

double true_ipm_conditional(const GaussianModel1d& model, double s) {
  model.validate();
  const double a = model.w1 * model.w1 * model.rho * model.rho;  // Var reduction w1^2 rho^2
  const double k_marg = 1.0 / std::sqrt(3.0);
  const double k_cond = 1.0 / std::sqrt(3.0 - 2.0 * a);
  const double k_cross = std::exp(-a * s * s / (2.0 * (3.0 - a))) / std::sqrt(3.0 - a);
  return std::sqrt(std::max(0.0, k_marg + k_cond - 2.0 * k_cross));
}

double true_ipm_conditional(const GaussianModelMulti& model, double s) {
  model.validate();
  const double m = static_cast<double>(model.m);
  const double rho2 = model.rho * model.rho;
  const double base = 1.0 + 2.0 / m;
  const double k_marg = std::pow(base, -0.5 * m);
  const double k_cond = 1.0 / std::sqrt(std::pow(base, m - 1.0) * (base - 2.0 * rho2));
  const double k_cross = std::exp(-0.5 * rho2 * s * s * m / (m + 2.0 - m * rho2)) /
                         std::sqrt(std::pow(base, m - 1.0) * (base - rho2));
  return std::sqrt(std::max(0.0, k_marg + k_cond - 2.0 * k_cross));
}

namespace {

template <typename Model>
double eipm_monte_carlo(const Model& model, int num_draws, std::uint64_t seed) {
  model.validate();
  if (num_draws < 1) throw std::invalid_argument("true_eipm_monte_carlo: need at least one draw");
  Rng rng = Rng(seed).derive(0x747275746873ULL);
  double total = 0.0;
  for (int i = 0; i < num_draws; ++i) total += true_ipm_conditional(model, rng.normal());
  return total / static_cast<double>(num_draws);
}

}  // namespace

double true_eipm_monte_carlo(const GaussianModel1d& model, int num_draws, std::uint64_t seed) {
  return eipm_monte_carlo(model, num_draws, seed);
}

double true_eipm_monte_carlo(const GaussianModelMulti& model, int num_draws, std::uint64_t seed) {
  return eipm_monte_carlo(model, num_draws, seed);
}

SampleBatch sample_synthetic_1d(const GaussianModel1d& model, int n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw std::invalid_argument("sample_synthetic_1d: n must be >= 1");

  Eigen::MatrixXd cov(3, 3);
  cov << 1.0, model.rho, 0.0,  //
      model.rho, 1.0, 0.0,     //
      0.0, 0.0, 1.0;
  Rng rng = Rng(seed).derive(0x31645f64617461ULL);
  const Eigen::MatrixXd draws = sample_gaussian(cholesky_lower(cov), n, rng);

  SampleBatch batch;
  batch.S = draws.col(0);
  batch.X = draws.rightCols(2);
  return batch;
}

SampleBatch sample_synthetic_multi(const GaussianModelMulti& model, int n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw std::invalid_argument("sample_synthetic_multi: n must be >= 1");

  const int m = model.m;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m + 1, m + 1);
  cov(0, 0) = 1.0;
  const double cross = model.rho / std::sqrt(static_cast<double>(m));
  for (int k = 1; k <= m; ++k) {
    cov(0, k) = cov(k, 0) = cross;
    cov(k, k) = 1.0 / static_cast<double>(m);
  }
  Rng rng = Rng(seed).derive(0x6d645f64617461ULL);
  const Eigen::MatrixXd draws = sample_gaussian(cholesky_lower(cov), n, rng);

  SampleBatch batch;
  batch.S = draws.col(0);
  batch.X = draws.rightCols(m);
  return batch;
}

}  // namespace frem
