#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frem/kernels.hpp"

namespace frem {

// One line of the estimator simulation study: error statistics of an
// estimator configuration against the Monte-Carlo ground truth.
struct SimulationRow {
  std::string design;
  std::string estimator;
  double param = 0.0;  // gamma, or n_bins for the binning estimator
  int n = 0;
  int m = 0;
  int reps = 0;
  double bias = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

struct SimulationConfig {
  std::string design = "1d";  // "1d" or "multi"
  int n = 100;
  int m = 1;           // multi design only
  int reps = 100;
  double rho = 0.4;    // multi default, if negative: 1/(3 sqrt(m))
  double w1 = 0.7071067811865476;  // 1d design only; w2 = sqrt(1 - w1^2)
  std::string estimator = "proposed";  // proposed | binning | nw
  std::vector<double> gammas;          // proposed and nw
  std::vector<int> bins;               // binning
  SmoothingFamily family = SmoothingFamily::kRbf;
  double sigma = 1.0;
  int nw_draws = 1000;
  int truth_draws = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
};

// Runs `reps` replications with derived seeds (seed + replication index),
// estimates EIPM for every parameter value and aggregates bias / MAE / RMSE
// against the analytic-design ground truth.
std::vector<SimulationRow> run_simulation(const SimulationConfig& config);

std::string simulation_csv_header();
std::string to_csv_line(const SimulationRow& row);

}  // namespace frem
