#include "frem/eipm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "frem/rng.hpp"

namespace frem {

namespace {

constexpr double kSqrtStabilizer = 1e-12;

// Pairwise squared distances from explicit row differences, so identical
// rows give an exact zero.
Eigen::MatrixXd pairwise_sq_dists(const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  const Eigen::Index n = Z.rows();
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d2(i, j) = d2(j, i) = (Z.row(i) - Z.row(j)).squaredNorm();
    }
  }
  return d2;
}

// Centered kernel kappa - 1 via expm1. For weight vectors with zero sum,
// a^T (K - 1 1^T) a equals a^T K a analytically but annihilates the all-ones
// component exactly, making the zero case (constant Z) return exactly 0.
Eigen::MatrixXd centered_gram(const MmdKernelSpec& spec,
                              const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  spec.validate();
  const double inv = -1.0 / (2.0 * spec.scale * spec.scale);
  return (pairwise_sq_dists(Z).array() * inv).unaryExpr([](double x) { return std::expm1(x); });
}

// Per-anchor quadratic forms Q_i = a_i^T K a_i as the diagonal of A K A^T.
Eigen::VectorXd anchor_quadratic_forms(const Eigen::MatrixXd& A, const Eigen::MatrixXd& K) {
  return ((A * K).cwiseProduct(A)).rowwise().sum();
}

void check_zs(const Eigen::Ref<const Eigen::MatrixXd>& Z,
              const Eigen::Ref<const Eigen::VectorXd>& S) {
  if (Z.rows() != S.size()) {
    throw std::invalid_argument("Z and S must have the same number of rows (" +
                                std::to_string(Z.rows()) + " vs " + std::to_string(S.size()) + ")");
  }
  if (Z.rows() < 2) throw std::invalid_argument("EIPM estimators need at least 2 samples");
}

}  // namespace

double mmd_between_weighted_empiricals(const MmdKernelSpec& kernel,
                                       const Eigen::Ref<const Eigen::VectorXd>& p,
                                       const Eigen::Ref<const Eigen::VectorXd>& q,
                                       const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  if (p.size() != Z.rows() || q.size() != Z.rows()) {
    throw std::invalid_argument("weight vectors must match the number of rows of Z");
  }
  for (const auto* w : {&p, &q}) {
    if ((w->array() < 0.0).any()) {
      throw std::invalid_argument("weight vectors must be nonnegative");
    }
    if (std::abs(w->sum() - 1.0) > 1e-8) {
      throw std::invalid_argument("weight vectors must sum to 1, got " + std::to_string(w->sum()));
    }
  }
  // p - q has zero total mass, so the all-ones kernel component drops out;
  // using the centered Gram keeps the identical-distribution case exactly 0.
  const Eigen::MatrixXd K = centered_gram(kernel, Z);
  const Eigen::VectorXd d = p - q;
  return std::sqrt(std::max(0.0, d.dot(K * d)));
}

EipmEstimate eipm_proposed(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                           const Eigen::Ref<const Eigen::VectorXd>& S,
                           const SmoothingKernelSpec& spec_s,
                           const MmdKernelSpec& spec_z) {
  check_zs(Z, S);
  const WeightMatrix A = centered_weight_matrix(spec_s, S);
  const Eigen::MatrixXd K = centered_gram(spec_z, Z);
  const Eigen::VectorXd Q = anchor_quadratic_forms(A.entries, K);

  const Eigen::Index n = Z.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += std::sqrt(std::max(0.0, Q(i)));

  EipmEstimate est;
  est.value = total / static_cast<double>(n);
  est.n = n;
  est.method = EipmMethod::kProposed;
  est.params.gamma = spec_s.bandwidth;
  est.params.sigma = spec_z.scale;
  return est;
}

EipmEstimate eipm_binning(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                          const Eigen::Ref<const Eigen::VectorXd>& S,
                          int n_bins, const MmdKernelSpec& spec_z) {
  check_zs(Z, S);
  if (n_bins < 2) throw std::invalid_argument("eipm_binning: n_bins must be >= 2");
  const Eigen::Index n = Z.rows();
  if (static_cast<Eigen::Index>(n_bins) > n) {
    throw std::invalid_argument("eipm_binning: more bins than samples");
  }

  // Nearest-rank quantile boundaries; ties go to the lower bin.
  std::vector<double> sorted(S.data(), S.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> boundaries(n_bins - 1);
  for (int b = 1; b < n_bins; ++b) {
    const auto rank = static_cast<Eigen::Index>(
        std::ceil(static_cast<double>(b) * static_cast<double>(n) / n_bins));
    boundaries[b - 1] = sorted[rank - 1];
  }

  std::vector<int> bin_of(n);
  std::vector<Eigen::Index> bin_count(n_bins, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = 0;
    while (b < n_bins - 1 && S(i) > boundaries[b]) ++b;
    bin_of[i] = b;
    ++bin_count[b];
  }
  for (int b = 0; b < n_bins; ++b) {
    if (bin_count[b] == 0) {
      throw std::invalid_argument("eipm_binning: quantile bin " + std::to_string(b) +
                                  " is empty (ties at the boundaries)");
    }
  }

  const Eigen::MatrixXd K = centered_gram(spec_z, Z);
  const Eigen::VectorXd marginal = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double value = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (bin_of[i] == b) p(i) = 1.0 / static_cast<double>(bin_count[b]);
    }
    const Eigen::VectorXd d = p - marginal;
    const double mmd = std::sqrt(std::max(0.0, d.dot(K * d)));
    value += static_cast<double>(bin_count[b]) / static_cast<double>(n) * mmd;
  }

  EipmEstimate est;
  est.value = value;
  est.n = n;
  est.method = EipmMethod::kBinning;
  est.params.n_bins = n_bins;
  est.params.sigma = spec_z.scale;
  return est;
}

EipmEstimate eipm_eo(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                     const Eigen::Ref<const Eigen::VectorXd>& S,
                     const Eigen::Ref<const Eigen::VectorXd>& Y,
                     const SmoothingKernelSpec& spec_s,
                     const MmdKernelSpec& spec_z) {
  check_zs(Z, S);
  const WeightMatrix A = eo_centered_weight_matrix(spec_s, S, Y);
  const Eigen::MatrixXd K = centered_gram(spec_z, Z);
  const Eigen::VectorXd Q = anchor_quadratic_forms(A.entries, K);

  double total = 0.0;
  Eigen::Index n1 = 0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    if (Y(i) == 1.0) {
      total += std::sqrt(std::max(0.0, Q(i)));
      ++n1;
    }
  }

  EipmEstimate est;
  est.value = total / static_cast<double>(n1);
  est.n = Z.rows();
  est.method = EipmMethod::kProposed;
  est.params.gamma = spec_s.bandwidth;
  est.params.sigma = spec_z.scale;
  return est;
}

EipmEstimate eipm_nw_plugin(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                            const Eigen::Ref<const Eigen::VectorXd>& S,
                            const SmoothingKernelSpec& spec_s,
                            const MmdKernelSpec& spec_z, int proposal_draws,
                            std::uint64_t seed) {
  check_zs(Z, S);
  spec_s.validate();
  spec_z.validate();
  if (proposal_draws < 1) throw std::invalid_argument("eipm_nw_plugin: need at least one proposal draw");

  const Eigen::Index n = Z.rows();
  const Eigen::Index m = Z.cols();
  const Eigen::Index R = proposal_draws;
  const double gamma = spec_s.bandwidth;

  // Two independent proposal sets from N(0, (2/m) I).
  Rng rng = Rng(seed).derive(0x6e77706c75ULL);
  const double proposal_sd = std::sqrt(2.0 / static_cast<double>(m));
  Eigen::MatrixXd Zp(R, m), Zq(R, m);
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) Zp(r, c) = proposal_sd * rng.normal();
  }
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) Zq(r, c) = proposal_sd * rng.normal();
  }

  // Product kernel K_gamma(z, Z_j) = prod_c k((z_c - Z_jc)/gamma) at every
  // (proposal, sample) pair, in the same unnormalized convention the
  // smoothing kernel uses; at larger m this shrinks the plug-in estimates
  // toward zero, which is the estimator's characteristic high-dimensional
  // failure mode.
  const auto density_matrix = [&](const Eigen::MatrixXd& P) {
    Eigen::MatrixXd G(R, n);
    const SmoothingKernelSpec coord{spec_s.family, gamma};
    for (Eigen::Index r = 0; r < R; ++r) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double prod = 1.0;
        for (Eigen::Index c = 0; c < m; ++c) {
          prod *= smoothing_kernel_eval(coord, P(r, c), Z(j, c));
        }
        G(r, j) = prod;
      }
    }
    return G;
  };
  const Eigen::MatrixXd Gp = density_matrix(Zp);
  const Eigen::MatrixXd Gq = density_matrix(Zq);

  // Proposal density values.
  const double md = static_cast<double>(m);
  const double log_norm = 0.5 * md * std::log(md / (4.0 * std::numbers::pi));
  const auto proposal_density = [&](const Eigen::MatrixXd& P) {
    return (log_norm - 0.25 * md * P.rowwise().squaredNorm().array()).exp().eval();
  };
  const Eigen::ArrayXd pd_p = proposal_density(Zp);
  const Eigen::ArrayXd pd_q = proposal_density(Zq);

  // Smoothing weights on S with zero diagonal, normalized per anchor column.
  Eigen::MatrixXd Ks(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Ks(j, i) = (i == j) ? 0.0 : smoothing_kernel_eval(spec_s, S(j), S(i));
    }
  }
  Eigen::MatrixXd W = Ks;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double total = W.col(i).sum();
    if (total > 0.0) {
      W.col(i) /= total;
    } else {
      // No kernel mass around this anchor: fall back to the leave-one-out
      // uniform weights so the conditional estimate matches the marginal.
      W.col(i).setConstant(1.0 / static_cast<double>(n - 1));
      W(i, i) = 0.0;
    }
  }

  // Importance-weighted density evaluations: U marginal, V conditional.
  const auto build_uv = [&](const Eigen::MatrixXd& G, const Eigen::ArrayXd& pd,
                            Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
    const Eigen::VectorXd row_sums = G.rowwise().sum();
    U = ((-G).colwise() + row_sums) / static_cast<double>(n - 1);
    V = G * W;
    U.array().colwise() /= pd;
    V.array().colwise() /= pd;
  };
  Eigen::MatrixXd Up, Vp, Uq, Vq;
  build_uv(Gp, pd_p, Up, Vp);
  build_uv(Gq, pd_q, Uq, Vq);
  if (!Up.allFinite() || !Vp.allFinite() || !Uq.allFinite() || !Vq.allFinite()) {
    throw std::runtime_error("eipm_nw_plugin: non-finite importance weights");
  }

  // Cross-proposal kernel matrix and the three bilinear terms per anchor.
  const Eigen::VectorXd sq_p = Zp.rowwise().squaredNorm();
  const Eigen::VectorXd sq_q = Zq.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (Zp * Zq.transpose());
  d2.colwise() += sq_p;
  d2.rowwise() += sq_q.transpose();
  const Eigen::MatrixXd M =
      (d2.array().max(0.0) * (-1.0 / (2.0 * spec_z.scale * spec_z.scale))).exp();

  const Eigen::MatrixXd MUq = M * Uq;
  const Eigen::MatrixXd MVq = M * Vq;
  const double inv_r2 = 1.0 / (static_cast<double>(R) * static_cast<double>(R));
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double est = (Up.col(i).dot(MUq.col(i)) + Vp.col(i).dot(MVq.col(i)) -
                        2.0 * Up.col(i).dot(MVq.col(i))) *
                       inv_r2;
    total += std::sqrt(std::max(0.0, est));
  }

  EipmEstimate est;
  est.value = total / static_cast<double>(n);
  est.n = n;
  est.method = EipmMethod::kNwPlugin;
  est.params.gamma = gamma;
  est.params.sigma = spec_z.scale;
  est.params.proposal_draws = proposal_draws;
  est.params.seed = seed;
  return est;
}

EipmValueGrad eipm_value_and_gradient(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                      const WeightMatrix& weights,
                                      const MmdKernelSpec& spec_z,
                                      const Eigen::VectorXd* Y) {
  const Eigen::Index n = Z.rows();
  if (weights.size() != n) throw std::invalid_argument("weight matrix does not match Z");
  if (weights.kind == WeightKind::kEo && Y == nullptr) {
    throw std::invalid_argument("EO weights require labels");
  }

  const Eigen::MatrixXd& A = weights.entries;
  const Eigen::MatrixXd K_centered = centered_gram(spec_z, Z);
  const Eigen::VectorXd Q = anchor_quadratic_forms(A, K_centered);

  Eigen::Index anchors = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights.kind == WeightKind::kDp || (*Y)(i) == 1.0) ++anchors;
  }

  double value = 0.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const double inv_anchors = 1.0 / static_cast<double>(anchors);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights.kind == WeightKind::kEo && (*Y)(i) != 1.0) continue;
    const double q_pos = std::max(0.0, Q(i));
    value += std::sqrt(q_pos) * inv_anchors;
    c(i) = inv_anchors / std::sqrt(q_pos + kSqrtStabilizer);
  }

  // dV/dZ_p = (1/sigma^2) sum_k H_pk (Z_k - Z_p) with H = K .* (A^T diag(c) A).
  // The explicit row differences keep the constant-Z gradient exactly zero.
  const Eigen::MatrixXd H =
      (K_centered.array() + 1.0).matrix().cwiseProduct(A.transpose() * c.asDiagonal() * A);
  const double inv_sigma2 = 1.0 / (spec_z.scale * spec_z.scale);
  EipmValueGrad out;
  out.value = value;
  out.grad = Eigen::MatrixXd::Zero(n, Z.cols());
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (H(p, k) != 0.0) out.grad.row(p) += H(p, k) * (Z.row(k) - Z.row(p));
    }
  }
  out.grad *= inv_sigma2;
  return out;
}

Eigen::MatrixXd eipm_gradient(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                              const Eigen::Ref<const Eigen::VectorXd>& S,
                              const SmoothingKernelSpec& spec_s,
                              const MmdKernelSpec& spec_z, WeightKind kind,
                              const Eigen::VectorXd* Y) {
  check_zs(Z, S);
  if (kind == WeightKind::kEo) {
    if (Y == nullptr) throw std::invalid_argument("eipm_gradient: EO kind requires labels");
    const WeightMatrix A = eo_centered_weight_matrix(spec_s, S, *Y);
    return eipm_value_and_gradient(Z, A, spec_z, Y).grad;
  }
  const WeightMatrix A = centered_weight_matrix(spec_s, S);
  return eipm_value_and_gradient(Z, A, spec_z).grad;
}

}  // namespace frem
