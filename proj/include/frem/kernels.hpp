#pragma once

#include <Eigen/Dense>

namespace frem {

enum class SmoothingFamily { kRbf, kTriangular, kEpanechnikov };

// Kernel K_gamma(s, s') = k((s - s') / gamma) on the sensitive attribute.
// All three base functions are symmetric, nonnegative, bounded and integrate
// to one, so they share the same effective-bandwidth semantics.
struct SmoothingKernelSpec {
  SmoothingFamily family = SmoothingFamily::kRbf;
  double bandwidth = 1.0;

  void validate() const;
};

// RBF kernel kappa(z, z') = exp(-||z - z'||^2 / (2 sigma^2)) on the
// representation space; the discriminator class is the unit ball of its RKHS.
struct MmdKernelSpec {
  double scale = 1.0;

  void validate() const;
};

enum class WeightKind { kDp, kEo };

// Centered kernel-weight matrix: row i holds the leave-one-out smoothing
// weights around anchor i minus the uniform weight. Diagonal is exactly zero
// and every used row sums to zero.
struct WeightMatrix {
  Eigen::MatrixXd entries;
  WeightKind kind = WeightKind::kDp;

  [[nodiscard]] Eigen::Index size() const { return entries.rows(); }
};

// k((s - s2) / gamma); base functions:
//   RBF          exp(-u^2/2) / sqrt(2 pi)
//   Triangular   max(0, 1 - |u|)
//   Epanechnikov 0.75 (1 - u^2) on |u| <= 1
double smoothing_kernel_eval(const SmoothingKernelSpec& spec, double s, double s2);

double mmd_kernel_eval(const MmdKernelSpec& spec,
                       const Eigen::Ref<const Eigen::VectorXd>& z,
                       const Eigen::Ref<const Eigen::VectorXd>& z2);

// Pairwise kappa over the rows of Z; symmetric with unit diagonal.
Eigen::MatrixXd mmd_gram_matrix(const MmdKernelSpec& spec,
                                const Eigen::Ref<const Eigen::MatrixXd>& Z);

// A[i][j] = K(S_i,S_j) / sum_{j' != i} K(S_i,S_j') - 1/(n-1), diagonal zero.
// Rows whose kernel mass vanishes (compact-support kernels) fall back to
// uniform weights and therefore become identically zero.
WeightMatrix centered_weight_matrix(const SmoothingKernelSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& S);

// Equal-opportunity variant: weights are confined to samples with Y_j = 1 and
// centered by 1/(n1 - 1), where n1 = |{j : Y_j = 1}| (requires n1 >= 2).
WeightMatrix eo_centered_weight_matrix(const SmoothingKernelSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& S,
                                       const Eigen::Ref<const Eigen::VectorXd>& Y);

}  // namespace frem
