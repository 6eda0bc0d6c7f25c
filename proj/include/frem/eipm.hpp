#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "frem/kernels.hpp"

namespace frem {

enum class EipmMethod { kProposed, kBinning, kNwPlugin };

struct EipmParams {
  std::optional<double> gamma;
  std::optional<int> n_bins;
  double sigma = 1.0;
  std::optional<int> proposal_draws;  // R, NW plug-in only
  std::optional<std::uint64_t> seed;  // NW plug-in only
};

struct EipmEstimate {
  double value = 0.0;
  Eigen::Index n = 0;
  EipmMethod method = EipmMethod::kProposed;
  EipmParams params;
};

// MMD between two weighted empirical distributions over the same support
// rows Z: sqrt(max(0, (p - q)^T K (p - q))). Weights must be nonnegative
// and sum to one.
double mmd_between_weighted_empiricals(const MmdKernelSpec& kernel,
                                       const Eigen::Ref<const Eigen::VectorXd>& p,
                                       const Eigen::Ref<const Eigen::VectorXd>& q,
                                       const Eigen::Ref<const Eigen::MatrixXd>& Z);

// Kernel-smoothed estimator: (1/n) sum_i sqrt(max(0, a_i^T K a_i)) with a_i
// the i-th row of the centered weight matrix.
EipmEstimate eipm_proposed(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                           const Eigen::Ref<const Eigen::VectorXd>& S,
                           const SmoothingKernelSpec& spec_s,
                           const MmdKernelSpec& spec_z);

// Quantile-binning baseline: S is bucketed into n_bins groups by empirical
// quantiles (nearest rank, ties to the lower bin), then
// value = sum_b (n_b/n) MMD(empirical of bin b, empirical of all rows).
EipmEstimate eipm_binning(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                          const Eigen::Ref<const Eigen::VectorXd>& S,
                          int n_bins, const MmdKernelSpec& spec_z);

// Nadaraya-Watson plug-in baseline: leave-one-out kernel density estimates of
// q(z) and q(z | S = S_i) are integrated against kappa by importance sampling
// with R draws from N(0, (2/m) I); deterministic per seed.
EipmEstimate eipm_nw_plugin(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                            const Eigen::Ref<const Eigen::VectorXd>& S,
                            const SmoothingKernelSpec& spec_s,
                            const MmdKernelSpec& spec_z, int proposal_draws,
                            std::uint64_t seed);

// Equal-opportunity variant restricted to anchors with Y_i = 1.
EipmEstimate eipm_eo(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                     const Eigen::Ref<const Eigen::VectorXd>& S,
                     const Eigen::Ref<const Eigen::VectorXd>& Y,
                     const SmoothingKernelSpec& spec_s,
                     const MmdKernelSpec& spec_z);

// Analytic gradient of the proposed (or EO) estimator with respect to Z.
// Each per-anchor square root is stabilized as sqrt(max(0, Q_i) + 1e-12) so
// the gradient stays finite at Q_i = 0.
Eigen::MatrixXd eipm_gradient(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                              const Eigen::Ref<const Eigen::VectorXd>& S,
                              const SmoothingKernelSpec& spec_s,
                              const MmdKernelSpec& spec_z, WeightKind kind,
                              const Eigen::VectorXd* Y = nullptr);

// Value and gradient in one pass over a precomputed weight matrix; used by
// the trainer so the batch Gram matrix is built once.
struct EipmValueGrad {
  double value = 0.0;
  Eigen::MatrixXd grad;
};
EipmValueGrad eipm_value_and_gradient(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                      const WeightMatrix& weights,
                                      const MmdKernelSpec& spec_z,
                                      const Eigen::VectorXd* Y = nullptr);

}  // namespace frem
