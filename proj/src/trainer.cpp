#include "frem/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frem/eipm.hpp"
#include "frem/rng.hpp"

namespace frem {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& logits) {
  return logits.unaryExpr([](double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  });
}

}  // namespace

void TrainConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
  if (weight_decay < 0.0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 2) throw std::invalid_argument("TrainConfig: batch size must be >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("TrainConfig: gamma must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("TrainConfig: sigma must be > 0");
  if (hidden_dim < 1 || rep_dim < 1) throw std::invalid_argument("TrainConfig: bad dimensions");
}

std::pair<double, Eigen::VectorXd> supervised_loss(const Eigen::Ref<const Eigen::VectorXd>& yhat,
                                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                                   Task task) {
  if (yhat.size() != y.size()) throw std::invalid_argument("supervised_loss: size mismatch");
  const Eigen::Index n = y.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  if (task == Task::kRegression) {
    const Eigen::VectorXd diff = yhat - y;
    return {diff.squaredNorm() * inv_n, 2.0 * inv_n * diff};
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw std::invalid_argument("supervised_loss: classification labels must be 0 or 1");
    }
  }
  // Stable BCE on logits: max(z,0) - y z + log(1 + exp(-|z|)).
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = yhat(i);
    loss += std::max(z, 0.0) - y(i) * z + std::log1p(std::exp(-std::abs(z)));
  }
  const Eigen::VectorXd grad = inv_n * (sigmoid(yhat) - y);
  return {loss * inv_n, grad};
}

std::pair<double, Eigen::VectorXd> reg_gdp_penalty(const Eigen::Ref<const Eigen::VectorXd>& pred,
                                                   const Eigen::Ref<const Eigen::VectorXd>& S,
                                                   const SmoothingKernelSpec& spec_s) {
  if (pred.size() != S.size()) throw std::invalid_argument("reg_gdp_penalty: size mismatch");
  constexpr double kSmooth = 1e-8;
  const Eigen::Index n = pred.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  const WeightMatrix A = centered_weight_matrix(spec_s, S);
  const Eigen::VectorXd gap = A.entries * pred;
  const Eigen::ArrayXd smooth = (gap.array().square() + kSmooth).sqrt();
  const double value = smooth.sum() * inv_n;
  const Eigen::VectorXd upstream = (gap.array() / smooth).matrix() * inv_n;
  return {value, A.entries.transpose() * upstream};
}

TrainResult train_frem(const SampleBatch& data, const TrainConfig& config) {
  config.validate();
  data.validate();
  if (!data.Y) throw std::invalid_argument("train_frem: dataset has no labels");
  const Eigen::Index n = data.n();
  if (n < 2) throw std::invalid_argument("train_frem: need at least 2 samples");

  const SmoothingKernelSpec spec_s{config.family, config.gamma};
  const MmdKernelSpec spec_z{config.sigma};

  TrainResult result;
  result.net = init_network(data.d(), config.hidden_dim, config.rep_dim,
                            Rng(config.seed).derive(0x696e6974ULL).next_u64());
  OptimizerState opt = OptimizerState::like(result.net);

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng shuffle_rng = Rng(config.seed).derive(0x7368756666ULL);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j =
          static_cast<Eigen::Index>(shuffle_rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }

    double sup_sum = 0.0, fair_sum = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - start);
      if (size < 2) break;  // drop a trailing singleton

      Eigen::MatrixXd xb(size, data.d());
      Eigen::VectorXd yb(size), sb(size);
      for (Eigen::Index r = 0; r < size; ++r) {
        const Eigen::Index src = order[start + r];
        xb.row(r) = data.X.row(src);
        yb(r) = (*data.Y)(src);
        sb(r) = data.S(src);
      }

      const ForwardCache cache = forward(result.net, xb);
      auto [sup, d_yhat] = supervised_loss(cache.yhat, yb, config.task);

      double fair = 0.0;
      Eigen::MatrixXd d_z = Eigen::MatrixXd::Zero(size, config.rep_dim);
      if (config.regularizer == Regularizer::kFrem) {
        if (config.fairness == FairnessKind::kEo) {
          const auto positives = static_cast<Eigen::Index>(yb.sum());
          if (positives >= 2) {
            const WeightMatrix A = eo_centered_weight_matrix(spec_s, sb, yb);
            const EipmValueGrad vg = eipm_value_and_gradient(cache.z, A, spec_z, &yb);
            fair = vg.value;
            if (config.lambda > 0.0) d_z = config.lambda * vg.grad;
          } else {
            ++result.history.eo_skipped_batches;
          }
        } else {
          const WeightMatrix A = centered_weight_matrix(spec_s, sb);
          const EipmValueGrad vg = eipm_value_and_gradient(cache.z, A, spec_z);
          fair = vg.value;
          if (config.lambda > 0.0) d_z = config.lambda * vg.grad;
        }
      } else if (config.regularizer == Regularizer::kRegGdp) {
        // Penalize the prediction directly (probability for classification).
        if (config.task == Task::kClassification) {
          const Eigen::VectorXd prob = sigmoid(cache.yhat);
          auto [value, d_prob] = reg_gdp_penalty(prob, sb, spec_s);
          fair = value;
          if (config.lambda > 0.0) {
            d_yhat += config.lambda *
                      d_prob.cwiseProduct(prob.cwiseProduct(Eigen::VectorXd::Ones(size) - prob));
          }
        } else {
          auto [value, d_pred] = reg_gdp_penalty(cache.yhat, sb, spec_s);
          fair = value;
          if (config.lambda > 0.0) d_yhat += config.lambda * d_pred;
        }
      }

      const double total = sup + config.lambda * fair;
      if (!std::isfinite(total)) {
        throw std::runtime_error("train_frem: non-finite loss at epoch " + std::to_string(epoch) +
                                 " (supervised " + std::to_string(sup) + ", fairness " +
                                 std::to_string(fair) + ")");
      }

      const Gradients grads = backward(result.net, cache, d_yhat, d_z);
      adam_step(opt, result.net, grads, config.lr, config.weight_decay);

      sup_sum += sup;
      fair_sum += fair;
      ++batches;
    }

    EpochRecord record;
    record.supervised = sup_sum / batches;
    record.fairness = fair_sum / batches;
    record.total = record.supervised + config.lambda * record.fairness;
    result.history.epochs.push_back(record);
  }
  return result;
}

FairnessReport evaluate(const Network& net, const SampleBatch& data, Task task,
                        const EvalSpec& spec) {
  data.validate();
  const ForwardCache cache = forward(net, data.X);
  const SmoothingKernelSpec spec_s{SmoothingFamily::kRbf, spec.gdp_gamma};
  const MmdKernelSpec spec_z{spec.eipm_sigma};

  FairnessReport report;
  Eigen::VectorXd pred;
  if (task == Task::kClassification) {
    report.task = "classification";
    pred = sigmoid(cache.yhat);
    if (data.Y) {
      report.accuracy = accuracy(pred, *data.Y);
      report.average_precision = average_precision(cache.yhat, *data.Y);
    }
  } else {
    report.task = "regression";
    pred = cache.yhat;
    if (data.Y) {
      report.mse = mean_squared_error(pred, *data.Y);
      report.mae = mean_absolute_error(pred, *data.Y);
    }
  }

  report.gdp = estimate_gdp(pred, data.S, spec_s);
  if (data.Y && task == Task::kClassification) {
    const auto positives = static_cast<Eigen::Index>(data.Y->sum());
    if (positives >= 2) report.geo = estimate_geo(pred, data.S, *data.Y, spec_s);
  }
  report.eipm = eipm_proposed(cache.z, data.S, spec_s, spec_z).value;
  report.mi_pred_s = estimate_mi_knn(pred, data.S, spec.mi_neighbors);
  report.mi_z_s = estimate_mi_knn(data.S, cache.z, spec.mi_neighbors);
  return report;
}

double select_bandwidth(const SampleBatch& data, const TrainConfig& config,
                        const std::vector<double>& grid, double gdp_tolerance) {
  if (grid.empty()) throw std::invalid_argument("select_bandwidth: empty grid");
  auto [train, valid] = split(data, 0.8, 0.2, Rng(config.seed).derive(0x76616cULL).next_u64());

  struct Candidate {
    double gamma;
    double gdp;
    double task_metric;  // higher is better
  };
  std::vector<Candidate> candidates;
  for (const double gamma : grid) {
    TrainConfig trial = config;
    trial.gamma = gamma;
    const TrainResult run = train_frem(train, trial);
    const FairnessReport report = evaluate(run.net, valid, config.task);
    const double task_metric = config.task == Task::kClassification
                                   ? report.accuracy.value_or(0.0)
                                   : -report.mse.value_or(0.0);
    candidates.push_back({gamma, report.gdp, task_metric});
  }

  double best_gdp = candidates.front().gdp;
  for (const auto& c : candidates) best_gdp = std::min(best_gdp, c.gdp);
  const Candidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.gdp > best_gdp + gdp_tolerance) continue;
    if (best == nullptr || c.task_metric > best->task_metric) best = &c;
  }
  return best->gamma;
}

}  // namespace frem
