#include "frem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "frem/rng.hpp"

namespace frem {

namespace {

// Leave-one-out smoothed gap (A pred)_i restricted to the given anchors.
double mean_absolute_gap(const WeightMatrix& weights,
                         const Eigen::Ref<const Eigen::VectorXd>& pred,
                         const std::vector<Eigen::Index>& anchors) {
  const Eigen::VectorXd gap = weights.entries * pred;
  double total = 0.0;
  for (const Eigen::Index i : anchors) total += std::abs(gap(i));
  return total / static_cast<double>(anchors.size());
}

double digamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return result;
}

std::uint64_t hash_doubles(const double* data, Eigen::Index count, std::uint64_t h) {
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof(double));
    std::memcpy(&bits, &data[i], sizeof bits);
    h ^= bits;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double estimate_gdp(const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& S,
                    const SmoothingKernelSpec& spec_s) {
  if (pred.size() != S.size()) throw std::invalid_argument("estimate_gdp: size mismatch");
  const WeightMatrix A = centered_weight_matrix(spec_s, S);
  std::vector<Eigen::Index> anchors(S.size());
  std::iota(anchors.begin(), anchors.end(), Eigen::Index{0});
  return mean_absolute_gap(A, pred, anchors);
}

double estimate_geo(const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& S,
                    const Eigen::Ref<const Eigen::VectorXd>& Y,
                    const SmoothingKernelSpec& spec_s) {
  if (pred.size() != S.size() || Y.size() != S.size()) {
    throw std::invalid_argument("estimate_geo: size mismatch");
  }
  const WeightMatrix A = eo_centered_weight_matrix(spec_s, S, Y);
  std::vector<Eigen::Index> anchors;
  for (Eigen::Index i = 0; i < Y.size(); ++i) {
    if (Y(i) == 1.0) anchors.push_back(i);
  }
  return mean_absolute_gap(A, pred, anchors);
}

double estimate_mi_knn(const Eigen::Ref<const Eigen::VectorXd>& u,
                       const Eigen::Ref<const Eigen::MatrixXd>& v, int k) {
  const Eigen::Index n = u.size();
  if (v.rows() != n) throw std::invalid_argument("estimate_mi_knn: size mismatch");
  if (k < 1 || k >= n) throw std::invalid_argument("estimate_mi_knn: need n > k >= 1");

  // Deterministic tie-breaking jitter seeded from the data itself.
  constexpr double kJitter = 1e-10;
  std::uint64_t h = hash_doubles(u.data(), n, 0xcbf29ce484222325ULL);
  h = hash_doubles(v.data(), v.size(), h);
  Rng rng{h};
  Eigen::VectorXd uj = u;
  Eigen::MatrixXd vj = v;
  for (Eigen::Index i = 0; i < n; ++i) uj(i) += kJitter * rng.uniform();
  for (Eigen::Index i = 0; i < vj.rows(); ++i) {
    for (Eigen::Index c = 0; c < vj.cols(); ++c) vj(i, c) += kJitter * rng.uniform();
  }

  // Kraskov estimator #1 with Chebyshev distances in both marginals.
  std::vector<double> dx(n), dy(n), joint(n);
  double psi_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      dx[j] = std::abs(uj(i) - uj(j));
      dy[j] = (vj.row(i) - vj.row(j)).cwiseAbs().maxCoeff();
      joint[j] = std::max(dx[j], dy[j]);
    }
    joint[i] = std::numeric_limits<double>::infinity();  // exclude self
    std::vector<double> radius_pool = joint;
    std::nth_element(radius_pool.begin(), radius_pool.begin() + (k - 1), radius_pool.end());
    const double radius = radius_pool[k - 1];

    Eigen::Index nx = 0, ny = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (dx[j] < radius) ++nx;
      if (dy[j] < radius) ++ny;
    }
    psi_sum += digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
  }

  const double mi = digamma(static_cast<double>(n)) + digamma(static_cast<double>(k)) -
                    psi_sum / static_cast<double>(n);
  return std::max(0.0, mi);
}

double accuracy(const Eigen::Ref<const Eigen::VectorXd>& prob,
                const Eigen::Ref<const Eigen::VectorXd>& labels) {
  if (prob.size() != labels.size()) throw std::invalid_argument("accuracy: size mismatch");
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    const double predicted = prob(i) >= 0.5 ? 1.0 : 0.0;
    if (predicted == labels(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(prob.size());
}

double average_precision(const Eigen::Ref<const Eigen::VectorXd>& score,
                         const Eigen::Ref<const Eigen::VectorXd>& labels) {
  if (score.size() != labels.size()) throw std::invalid_argument("average_precision: size mismatch");
  const Eigen::Index n = score.size();
  const auto n_pos = static_cast<Eigen::Index>(labels.sum());
  if (n_pos == 0) return 0.0;

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return score(a) > score(b); });

  // Step-interpolated area: sum (R_k - R_{k-1}) P_k over distinct thresholds.
  double ap = 0.0;
  double prev_recall = 0.0;
  Eigen::Index tp = 0, seen = 0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && score(order[j]) == score(order[i])) {
      if (labels(order[j]) == 1.0) ++tp;
      ++seen;
      ++j;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double mean_squared_error(const Eigen::Ref<const Eigen::VectorXd>& pred,
                          const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse: size mismatch");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double mean_absolute_error(const Eigen::Ref<const Eigen::VectorXd>& pred,
                           const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mae: size mismatch");
  return (pred - target).cwiseAbs().sum() / static_cast<double>(pred.size());
}

}  // namespace frem
