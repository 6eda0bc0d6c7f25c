#include "frem/simulation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "frem/eipm.hpp"
#include "frem/gaussian_oracle.hpp"
#include "frem/parallel.hpp"

namespace frem {

namespace {

struct ParamSpec {
  double label;
  bool is_bins;
};

std::vector<ParamSpec> collect_params(const SimulationConfig& config) {
  std::vector<ParamSpec> params;
  if (config.estimator == "binning") {
    for (int b : config.bins) params.push_back({static_cast<double>(b), true});
  } else if (config.estimator == "proposed" || config.estimator == "nw") {
    for (double g : config.gammas) params.push_back({g, false});
  } else {
    throw std::invalid_argument("unknown estimator '" + config.estimator + "'");
  }
  if (params.empty()) {
    throw std::invalid_argument("no parameter values given for estimator '" + config.estimator +
                                "'");
  }
  return params;
}

SimulationRow aggregate(const SimulationConfig& config, const ParamSpec& param,
                        const std::vector<double>& estimates, double truth, int dim) {
  double bias = 0.0, mae = 0.0, mse = 0.0;
  for (double e : estimates) {
    const double err = e - truth;
    bias += err;
    mae += std::abs(err);
    mse += err * err;
  }
  const auto reps = static_cast<double>(estimates.size());
  SimulationRow row;
  row.design = config.design;
  row.estimator = config.estimator;
  row.param = param.label;
  row.n = config.n;
  row.m = dim;
  row.reps = static_cast<int>(estimates.size());
  row.bias = bias / reps;
  row.mae = mae / reps;
  row.rmse = std::sqrt(mse / reps);
  return row;
}

}  // namespace

std::vector<SimulationRow> run_simulation(const SimulationConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (config.n < 2) throw std::invalid_argument("n must be >= 2");
  const std::vector<ParamSpec> params = collect_params(config);
  const MmdKernelSpec spec_z{config.sigma};

  const bool multi = config.design == "multi";
  if (!multi && config.design != "1d") {
    throw std::invalid_argument("unknown design '" + config.design + "'");
  }

  GaussianModel1d model_1d;
  GaussianModelMulti model_multi;
  double truth = 0.0;
  int dim = 1;
  if (multi) {
    model_multi.m = config.m;
    model_multi.rho = config.rho >= 0.0 ? config.rho : 1.0 / (3.0 * std::sqrt(config.m));
    truth = true_eipm_monte_carlo(model_multi, config.truth_draws, config.seed);
    dim = config.m;
  } else {
    model_1d.rho = config.rho;
    model_1d.w1 = config.w1;
    model_1d.w2 = std::sqrt(std::max(0.0, 1.0 - config.w1 * config.w1));
    truth = true_eipm_monte_carlo(model_1d, config.truth_draws, config.seed);
  }

  // estimates[rep][param], filled by independent workers.
  std::vector<std::vector<double>> estimates(config.reps,
                                             std::vector<double>(params.size(), 0.0));
  parallel_for(
      static_cast<std::size_t>(config.reps),
      [&](std::size_t rep) {
        const std::uint64_t rep_seed = config.seed + rep;
        Eigen::MatrixXd Z;
        Eigen::VectorXd S;
        if (multi) {
          const SampleBatch batch = sample_synthetic_multi(model_multi, config.n, rep_seed);
          Z = batch.X;
          S = batch.S;
        } else {
          const SampleBatch batch = sample_synthetic_1d(model_1d, config.n, rep_seed);
          Eigen::Vector2d w(model_1d.w1, model_1d.w2);
          Z = batch.X * w;
          S = batch.S;
        }
        for (std::size_t p = 0; p < params.size(); ++p) {
          if (params[p].is_bins) {
            estimates[rep][p] =
                eipm_binning(Z, S, static_cast<int>(params[p].label), spec_z).value;
          } else if (config.estimator == "nw") {
            const SmoothingKernelSpec spec_s{config.family, params[p].label};
            estimates[rep][p] =
                eipm_nw_plugin(Z, S, spec_s, spec_z, config.nw_draws, rep_seed).value;
          } else {
            const SmoothingKernelSpec spec_s{config.family, params[p].label};
            estimates[rep][p] = eipm_proposed(Z, S, spec_s, spec_z).value;
          }
        }
      },
      config.workers);

  std::vector<SimulationRow> rows;
  rows.reserve(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::vector<double> column(config.reps);
    for (int r = 0; r < config.reps; ++r) column[r] = estimates[r][p];
    rows.push_back(aggregate(config, params[p], column, truth, dim));
  }
  return rows;
}

std::string simulation_csv_header() { return "design,estimator,param,n,m,reps,bias,mae,rmse"; }

std::string to_csv_line(const SimulationRow& row) {
  std::ostringstream out;
  out.precision(17);
  out << row.design << ',' << row.estimator << ',' << row.param << ',' << row.n << ',' << row.m
      << ',' << row.reps << ',' << row.bias << ',' << row.mae << ',' << row.rmse;
  return out.str();
}

}  // namespace frem
