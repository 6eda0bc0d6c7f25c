#include "frem/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace frem {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double base_kernel(SmoothingFamily family, double u) {
  switch (family) {
    case SmoothingFamily::kRbf:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case SmoothingFamily::kTriangular: {
      const double a = std::abs(u);
      return a >= 1.0 ? 0.0 : 1.0 - a;
    }
    case SmoothingFamily::kEpanechnikov: {
      const double u2 = u * u;
      return u2 >= 1.0 ? 0.0 : 0.75 * (1.0 - u2);
    }
  }
  throw std::logic_error("unknown smoothing kernel family");
}

}  // namespace

void SmoothingKernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("smoothing kernel bandwidth must be a positive finite number");
  }
}

void MmdKernelSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("MMD kernel scale must be a positive finite number");
  }
}

double smoothing_kernel_eval(const SmoothingKernelSpec& spec, double s, double s2) {
  spec.validate();
  if (!std::isfinite(s) || !std::isfinite(s2)) {
    throw std::invalid_argument("smoothing_kernel_eval: non-finite input");
  }
  return base_kernel(spec.family, (s - s2) / spec.bandwidth);
}

double mmd_kernel_eval(const MmdKernelSpec& spec,
                       const Eigen::Ref<const Eigen::VectorXd>& z,
                       const Eigen::Ref<const Eigen::VectorXd>& z2) {
  spec.validate();
  if (z.size() != z2.size()) {
    throw std::invalid_argument("mmd_kernel_eval: dimension mismatch (" +
                                std::to_string(z.size()) + " vs " +
                                std::to_string(z2.size()) + ")");
  }
  const double d2 = (z - z2).squaredNorm();
  return std::exp(-d2 / (2.0 * spec.scale * spec.scale));
}

Eigen::MatrixXd mmd_gram_matrix(const MmdKernelSpec& spec,
                                const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  spec.validate();
  const Eigen::Index n = Z.rows();
  if (n < 1) throw std::invalid_argument("mmd_gram_matrix: empty input");

  const double denom = 2.0 * spec.scale * spec.scale;
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      gram(i, j) = gram(j, i) = std::exp(-(Z.row(i) - Z.row(j)).squaredNorm() / denom);
    }
  }
  return gram;
}

WeightMatrix centered_weight_matrix(const SmoothingKernelSpec& spec,
                                    const Eigen::Ref<const Eigen::VectorXd>& S) {
  spec.validate();
  const Eigen::Index n = S.size();
  if (n < 2) throw std::invalid_argument("centered_weight_matrix: need at least 2 samples");

  const double uniform = 1.0 / static_cast<double>(n - 1);
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      A(i, j) = (j == i) ? 0.0 : smoothing_kernel_eval(spec, S(i), S(j));
      total += A(i, j);
    }
    if (total <= 0.0) {
      // No kernel mass around this anchor: uniform weights cancel the
      // centering term, so the row contributes nothing.
      A.row(i).setZero();
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) A(i, j) = A(i, j) / total - uniform;
    }
  }
  return WeightMatrix{std::move(A), WeightKind::kDp};
}

WeightMatrix eo_centered_weight_matrix(const SmoothingKernelSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& S,
                                       const Eigen::Ref<const Eigen::VectorXd>& Y) {
  spec.validate();
  const Eigen::Index n = S.size();
  if (Y.size() != n) {
    throw std::invalid_argument("eo_centered_weight_matrix: S/Y size mismatch");
  }
  Eigen::Index n1 = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (Y(j) != 0.0 && Y(j) != 1.0) {
      throw std::invalid_argument("eo_centered_weight_matrix: labels must be 0 or 1");
    }
    if (Y(j) == 1.0) ++n1;
  }
  if (n1 < 2) {
    throw std::invalid_argument("eo_centered_weight_matrix: need at least 2 positive labels, got " +
                                std::to_string(n1));
  }

  const double uniform = 1.0 / static_cast<double>(n1 - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || Y(j) != 1.0) continue;
      A(i, j) = smoothing_kernel_eval(spec, S(i), S(j));
      total += A(i, j);
    }
    if (total <= 0.0) {
      A.row(i).setZero();
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && Y(j) == 1.0) A(i, j) = A(i, j) / total - uniform;
    }
  }
  return WeightMatrix{std::move(A), WeightKind::kEo};
}

}  // namespace frem
