#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frem/data.hpp"
#include "frem/kernels.hpp"
#include "frem/metrics.hpp"
#include "frem/net.hpp"

namespace frem {

enum class Task { kClassification, kRegression };
enum class FairnessKind { kDp, kEo };
enum class Regularizer { kFrem, kRegGdp, kNone };

struct TrainConfig {
  double lambda = 0.0;
  double lr = 0.001;
  double weight_decay = 0.01;
  int epochs = 200;
  int batch_size = 200;
  double gamma = 0.1;          // smoothing bandwidth for the fairness term
  double sigma = 1.0;          // MMD scale
  SmoothingFamily family = SmoothingFamily::kRbf;
  Task task = Task::kClassification;
  FairnessKind fairness = FairnessKind::kDp;
  Regularizer regularizer = Regularizer::kFrem;
  Eigen::Index hidden_dim = 50;
  Eigen::Index rep_dim = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  double supervised = 0.0;
  double fairness = 0.0;
  double total = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int eo_skipped_batches = 0;  // mini-batches with < 2 positives
};

struct TrainResult {
  Network net;
  TrainHistory history;
};

// Supervised loss and its gradient at the raw outputs: mean binary
// cross-entropy on logits for classification, mean squared error for
// regression.
std::pair<double, Eigen::VectorXd> supervised_loss(const Eigen::Ref<const Eigen::VectorXd>& yhat,
                                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                                   Task task);

// Differentiable surrogate of estimate_gdp: |.| replaced by
// sqrt(. ^2 + 1e-8). Returns the value and its gradient at the predictions.
std::pair<double, Eigen::VectorXd> reg_gdp_penalty(const Eigen::Ref<const Eigen::VectorXd>& pred,
                                                   const Eigen::Ref<const Eigen::VectorXd>& S,
                                                   const SmoothingKernelSpec& spec_s);

// Mini-batch training: supervised loss plus lambda times the batch-local
// fairness term (EIPM for FREM, the smooth GDP surrogate for Reg-GDP).
// Deterministic per seed.
TrainResult train_frem(const SampleBatch& data, const TrainConfig& config);

struct EvalSpec {
  double gdp_gamma = 0.1;  // evaluation bandwidth on min-max-scaled S
  double eipm_sigma = 1.0;
  int mi_neighbors = 3;
};

FairnessReport evaluate(const Network& net, const SampleBatch& data, Task task,
                        const EvalSpec& spec = {});

// Bandwidth selection on a validation split: trains one model per candidate
// gamma and keeps the best validation task metric among candidates whose
// validation GDP is within `gdp_tolerance` of the smallest one.
double select_bandwidth(const SampleBatch& data, const TrainConfig& config,
                        const std::vector<double>& grid, double gdp_tolerance = 0.02);

}  // namespace frem
