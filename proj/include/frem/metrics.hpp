#pragma once

#include <optional>

#include <Eigen/Dense>

#include "frem/kernels.hpp"

namespace frem {

// Fairness and task metrics for a model on one dataset.
struct FairnessReport {
  std::string task;  // "classification" or "regression"
  std::optional<double> accuracy;
  std::optional<double> average_precision;
  std::optional<double> mse;
  std::optional<double> mae;
  double gdp = 0.0;
  std::optional<double> geo;
  double eipm = 0.0;
  double mi_pred_s = 0.0;
  double mi_z_s = 0.0;
};

// Kernel-smoothed generalized demographic parity:
// (1/n) sum_i | mhat_{-i}(S_i) - ybar_{-i} | with leave-one-out
// Nadaraya-Watson smoothing of the predictions over S.
double estimate_gdp(const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& S,
                    const SmoothingKernelSpec& spec_s);

// Equal-opportunity variant restricted to samples with Y_i = 1.
double estimate_geo(const Eigen::Ref<const Eigen::VectorXd>& pred,
                    const Eigen::Ref<const Eigen::VectorXd>& S,
                    const Eigen::Ref<const Eigen::VectorXd>& Y,
                    const SmoothingKernelSpec& spec_s);

// kNN mutual information (Kraskov / Ross) between a scalar u and a scalar or
// vector v, clamped at zero. A deterministic jitter of magnitude 1e-10
// (seeded from the data) breaks ties.
double estimate_mi_knn(const Eigen::Ref<const Eigen::VectorXd>& u,
                       const Eigen::Ref<const Eigen::MatrixXd>& v, int k = 3);

// Task metrics.
double accuracy(const Eigen::Ref<const Eigen::VectorXd>& prob,
                const Eigen::Ref<const Eigen::VectorXd>& labels);
double average_precision(const Eigen::Ref<const Eigen::VectorXd>& score,
                         const Eigen::Ref<const Eigen::VectorXd>& labels);
double mean_squared_error(const Eigen::Ref<const Eigen::VectorXd>& pred,
                          const Eigen::Ref<const Eigen::VectorXd>& target);
double mean_absolute_error(const Eigen::Ref<const Eigen::VectorXd>& pred,
                           const Eigen::Ref<const Eigen::VectorXd>& target);

}  // namespace frem
