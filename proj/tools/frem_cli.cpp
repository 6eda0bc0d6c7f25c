// Command-line driver for the EIPM library: estimator simulation studies,
// FREM training, model audits and a gradient self-check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "frem/data.hpp"
#include "frem/gradcheck.hpp"
#include "frem/model_io.hpp"
#include "frem/simulation.hpp"
#include "frem/synth_task.hpp"
#include "frem/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

using nlohmann::json;

frem::Task parse_task(const std::string& name) {
  if (name == "classification") return frem::Task::kClassification;
  if (name == "regression") return frem::Task::kRegression;
  throw std::invalid_argument("--task must be 'classification' or 'regression'");
}

frem::SmoothingFamily parse_family(const std::string& name) {
  if (name == "rbf") return frem::SmoothingFamily::kRbf;
  if (name == "triangular") return frem::SmoothingFamily::kTriangular;
  if (name == "epanechnikov") return frem::SmoothingFamily::kEpanechnikov;
  throw std::invalid_argument("--kernel must be rbf, triangular or epanechnikov");
}

struct TrainFlags {
  std::string data;
  std::string task = "classification";
  std::string fairness = "dp";
  std::string regularizer = "frem";
  std::string kernel = "rbf";
  double lambda = 0.0;
  double gamma = 0.1;
  double sigma = 1.0;
  int epochs = 200;
  int batch = 200;
  std::uint64_t seed = 0;
  std::string out_model;
  std::string out_report;
};

json report_to_json(const frem::FairnessReport& report, const json& config,
                    std::uint64_t seed) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  json j;
  j["task"] = report.task;
  j["acc"] = opt(report.accuracy);
  j["ap"] = opt(report.average_precision);
  j["mse"] = opt(report.mse);
  j["mae"] = opt(report.mae);
  j["gdp"] = report.gdp;
  j["geo"] = opt(report.geo);
  j["eipm"] = report.eipm;
  j["mi_pred_s"] = report.mi_pred_s;
  j["mi_z_s"] = report.mi_z_s;
  j["config"] = config;
  j["seed"] = seed;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

int run_simulate(const frem::SimulationConfig& config, const std::string& out_path) {
  const std::vector<frem::SimulationRow> rows = frem::run_simulation(config);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << frem::simulation_csv_header() << '\n';
  for (const auto& row : rows) out << frem::to_csv_line(row) << '\n';
  std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
  return kExitOk;
}

int run_train(const TrainFlags& flags) {
  if (!std::filesystem::exists(flags.data)) {
    std::cerr << "error: data file '" << flags.data << "' does not exist\n";
    return kExitUsage;
  }
  const frem::SampleBatch raw = frem::load_csv(flags.data);
  auto [train_raw, test_raw] = frem::split(raw, 0.8, 0.2, flags.seed);
  auto [train, scaling] = frem::minmax_scale(train_raw);
  for (const auto& name : scaling.constant_columns) {
    std::cerr << "warning: column " << name << " is constant; scaled to zero\n";
  }
  const frem::SampleBatch test = frem::apply_scaling(test_raw, scaling);

  frem::TrainConfig config;
  config.lambda = flags.lambda;
  config.gamma = flags.gamma;
  config.sigma = flags.sigma;
  config.epochs = flags.epochs;
  config.batch_size = flags.batch;
  config.seed = flags.seed;
  config.task = parse_task(flags.task);
  config.family = parse_family(flags.kernel);
  config.fairness = flags.fairness == "eo" ? frem::FairnessKind::kEo : frem::FairnessKind::kDp;
  if (flags.regularizer == "frem") {
    config.regularizer = frem::Regularizer::kFrem;
  } else if (flags.regularizer == "reg-gdp") {
    config.regularizer = frem::Regularizer::kRegGdp;
  } else {
    config.regularizer = frem::Regularizer::kNone;
  }

  const frem::TrainResult result = frem::train_frem(train, config);
  if (result.history.eo_skipped_batches > 0) {
    std::cerr << "warning: " << result.history.eo_skipped_batches
              << " mini-batches had < 2 positives; their fairness term was skipped\n";
  }
  const frem::FairnessReport report = frem::evaluate(result.net, test, config.task);

  const json config_json = {{"data", flags.data},
                            {"task", flags.task},
                            {"fairness", flags.fairness},
                            {"regularizer", flags.regularizer},
                            {"kernel", flags.kernel},
                            {"lambda", flags.lambda},
                            {"gamma", flags.gamma},
                            {"sigma", flags.sigma},
                            {"epochs", flags.epochs},
                            {"batch", flags.batch}};
  if (!flags.out_model.empty()) {
    frem::save_model({result.net, scaling}, flags.out_model);
  }
  write_json(report_to_json(report, config_json, flags.seed), flags.out_report);

  const double final_sup = result.history.epochs.back().supervised;
  std::cout << "trained " << flags.epochs << " epochs; final supervised loss " << final_sup
            << "; report written to " << flags.out_report << '\n';
  return kExitOk;
}

int run_audit(const std::string& data_path, const std::string& model_path,
              const std::string& task_name, std::uint64_t seed, const std::string& out_report) {
  if (!std::filesystem::exists(data_path)) {
    std::cerr << "error: data file '" << data_path << "' does not exist\n";
    return kExitUsage;
  }
  const frem::ModelBundle bundle = frem::load_model(model_path);
  const frem::SampleBatch raw = frem::load_csv(data_path);
  auto [train_raw, test_raw] = frem::split(raw, 0.8, 0.2, seed);
  const frem::SampleBatch test = frem::apply_scaling(test_raw, bundle.scaling);

  const frem::Task task = parse_task(task_name);
  const frem::FairnessReport report = frem::evaluate(bundle.net, test, task);
  const json config_json = {{"data", data_path}, {"model", model_path}, {"task", task_name}};
  write_json(report_to_json(report, config_json, seed), out_report);
  std::cout << "audit report written to " << out_report << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EIPM estimators and FREM training for continuous sensitive attributes"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "estimator simulation study on synthetic designs");
  frem::SimulationConfig sim;
  sim.rho = -1.0;  // sentinel: design default
  std::string sim_kernel = "rbf";
  std::string sim_out = "simulation.csv";
  simulate->add_option("--design", sim.design, "1d or multi")->check(CLI::IsMember({"1d", "multi"}));
  simulate->add_option("--n", sim.n, "samples per replication");
  simulate->add_option("--m", sim.m, "representation dimension (multi design)");
  simulate->add_option("--rho", sim.rho, "correlation (default: 0.4 for 1d, 1/(3 sqrt(m)) for multi)");
  simulate->add_option("--w1", sim.w1, "first encoder weight (1d design)");
  simulate->add_option("--reps", sim.reps, "number of replications");
  simulate->add_option("--estimator", sim.estimator, "proposed, binning or nw")
      ->check(CLI::IsMember({"proposed", "binning", "nw"}));
  simulate->add_option("--gamma", sim.gammas, "bandwidths for proposed/nw");
  simulate->add_option("--bins", sim.bins, "bin counts for binning");
  simulate->add_option("--sigma", sim.sigma, "MMD scale (ground truth requires 1.0)");
  simulate->add_option("--kernel", sim_kernel, "smoothing kernel family")
      ->check(CLI::IsMember({"rbf", "triangular", "epanechnikov"}));
  simulate->add_option("--nw-draws", sim.nw_draws, "importance-sampling draws for nw");
  simulate->add_option("--truth-draws", sim.truth_draws, "Monte-Carlo draws for the ground truth");
  simulate->add_option("--seed", sim.seed, "base seed");
  simulate->add_option("--workers", sim.workers, "worker threads (0: all cores)");
  simulate->add_option("--out", sim_out, "output CSV path");

  auto* train = app.add_subcommand("train", "train a FREM (or baseline) model on a CSV dataset");
  TrainFlags tf;
  train->add_option("--data", tf.data, "input CSV (columns x0..x{d-1}, s, y)")->required();
  train->add_option("--task", tf.task)->check(CLI::IsMember({"classification", "regression"}));
  train->add_option("--fairness", tf.fairness)->check(CLI::IsMember({"dp", "eo"}));
  train->add_option("--regularizer", tf.regularizer)
      ->check(CLI::IsMember({"frem", "reg-gdp", "none"}));
  train->add_option("--lambda", tf.lambda, "fairness penalty weight");
  train->add_option("--gamma", tf.gamma, "smoothing bandwidth");
  train->add_option("--sigma", tf.sigma, "MMD scale");
  train->add_option("--kernel", tf.kernel)->check(CLI::IsMember({"rbf", "triangular", "epanechnikov"}));
  train->add_option("--epochs", tf.epochs);
  train->add_option("--batch", tf.batch);
  train->add_option("--seed", tf.seed);
  train->add_option("--out-model", tf.out_model, "model JSON path");
  train->add_option("--out-report", tf.out_report, "report JSON path")->required();

  auto* audit = app.add_subcommand("audit", "evaluate a saved model on the held-out split");
  std::string audit_data, audit_model, audit_task = "classification", audit_report;
  std::uint64_t audit_seed = 0;
  audit->add_option("--data", audit_data, "input CSV")->required();
  audit->add_option("--model", audit_model, "model JSON written by train")->required();
  audit->add_option("--task", audit_task)->check(CLI::IsMember({"classification", "regression"}));
  audit->add_option("--seed", audit_seed, "split seed used at training time");
  audit->add_option("--out-report", audit_report, "report JSON path")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of all gradients");
  std::uint64_t gc_seed = 0;
  int gc_rounds = 10;
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--rounds", gc_rounds, "number of random seeds per component");

  auto* gen = app.add_subcommand("gen-data", "write a synthetic biased classification CSV");
  int gen_n = 4000, gen_d = 5;
  double gen_corr = 0.6;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n);
  gen->add_option("--d", gen_d);
  gen->add_option("--corr", gen_corr, "correlation between x0 and s");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      if (sim.reps < 1) {
        std::cerr << "error: --reps must be >= 1\n";
        return kExitUsage;
      }
      if (sim.design == "1d" && sim.rho < 0.0) sim.rho = 0.4;
      if (sim.sigma != 1.0) {
        std::cerr << "error: the analytic ground truth is derived for --sigma 1.0\n";
        return kExitUsage;
      }
      if (sim.estimator == "binning" ? sim.bins.empty() : sim.gammas.empty()) {
        std::cerr << "error: no parameter values for estimator '" << sim.estimator << "'\n";
        return kExitUsage;
      }
      sim.family = parse_family(sim_kernel);
      return run_simulate(sim, sim_out);
    }
    if (train->parsed()) return run_train(tf);
    if (audit->parsed()) {
      return run_audit(audit_data, audit_model, audit_task, audit_seed, audit_report);
    }
    if (gradcheck->parsed()) {
      const frem::GradCheckReport report = frem::run_gradient_checks(gc_seed, gc_rounds);
      for (const auto& c : report.components) {
        std::printf("%-18s max relative error %.3e %s\n", c.name.c_str(), c.max_relative_error,
                    c.max_relative_error < report.tolerance ? "[ok]" : "[FAIL]");
      }
      return report.passed() ? kExitOk : kExitFailure;
    }
    if (gen->parsed()) {
      frem::write_csv(frem::make_biased_classification(gen_n, gen_d, gen_corr, gen_seed), gen_out);
      std::cout << "wrote " << gen_n << " rows to " << gen_out << '\n';
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
