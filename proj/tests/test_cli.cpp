// End-to-end checks of the command-line interface against the built binary.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

struct CommandResult {
  int exit_code;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string out_path = ::testing::TempDir() + "/cli_output.txt";
  const std::string command = std::string(FREM_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(command.c_str());
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return {WEXITSTATUS(status), buffer.str()};
}

std::string temp(const std::string& name) { return ::testing::TempDir() + "/" + name; }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  return j;
}

TEST(Cli, GradcheckPassesAndIsDeterministic) {
  const CommandResult a = run_cli("gradcheck --seed 7 --rounds 2");
  EXPECT_EQ(a.exit_code, 0) << a.output;
  const CommandResult b = run_cli("gradcheck --seed 7 --rounds 2");
  EXPECT_EQ(a.output, b.output);
}

TEST(Cli, SimulateWritesDeterministicCsv) {
  const std::string out = temp("sim.csv");
  const std::string flags =
      "simulate --design 1d --w1 0.70710678 --rho 0.4 --n 50 --reps 4 "
      "--estimator proposed --gamma 0.5 --seed 42 --truth-draws 20000 --out " + out;
  ASSERT_EQ(run_cli(flags).exit_code, 0);
  std::ifstream in(out);
  std::string header, row;
  ASSERT_TRUE(std::getline(in, header));
  EXPECT_EQ(header, "design,estimator,param,n,m,reps,bias,mae,rmse");
  ASSERT_TRUE(std::getline(in, row));
  EXPECT_EQ(row.rfind("1d,proposed,0.5,50,1,4,", 0), 0u);

  const std::string out2 = temp("sim2.csv");
  ASSERT_EQ(run_cli("simulate --design 1d --w1 0.70710678 --rho 0.4 --n 50 --reps 4 "
                    "--estimator proposed --gamma 0.5 --seed 42 --truth-draws 20000 --out " +
                    out2)
                .exit_code,
            0);
  std::ifstream in2(out2);
  std::string header2, row2;
  std::getline(in2, header2);
  std::getline(in2, row2);
  EXPECT_EQ(row, row2);
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run_cli("simulate --reps 0 --estimator proposed --gamma 0.5 --out " + temp("x.csv"))
                .exit_code,
            2);
  EXPECT_EQ(run_cli("simulate --estimator binning --out " + temp("x.csv")).exit_code, 2);
  EXPECT_EQ(run_cli("simulate --estimator proposed --gamma 0.5 --sigma 2.0 --out " +
                    temp("x.csv"))
                .exit_code,
            2);
  EXPECT_EQ(run_cli("train --out-report " + temp("r.json")).exit_code, 2);  // missing --data
  EXPECT_EQ(run_cli("train --data /nonexistent.csv --out-report " + temp("r.json")).exit_code, 2);
  EXPECT_EQ(run_cli("no-such-command").exit_code, 2);
}

TEST(Cli, TrainAuditRoundTrip) {
  const std::string data = temp("task.csv");
  ASSERT_EQ(run_cli("gen-data --n 400 --d 5 --corr 0.6 --seed 3 --out " + data).exit_code, 0);

  const std::string model = temp("model.json");
  const std::string report = temp("report.json");
  const std::string train_flags =
      "train --data " + data +
      " --task classification --regularizer frem --lambda 1.0 --gamma 0.1 "
      "--epochs 3 --batch 64 --seed 9 --out-model " + model + " --out-report " + report;
  const CommandResult trained = run_cli(train_flags);
  ASSERT_EQ(trained.exit_code, 0) << trained.output;

  const nlohmann::json train_report = read_json(report);
  EXPECT_EQ(train_report.at("task"), "classification");
  EXPECT_EQ(train_report.at("seed"), 9);
  EXPECT_TRUE(train_report.at("mse").is_null());
  EXPECT_GE(train_report.at("gdp").get<double>(), 0.0);

  const std::string audit_report = temp("audit.json");
  const CommandResult audited = run_cli("audit --data " + data + " --model " + model +
                                        " --task classification --seed 9 --out-report " +
                                        audit_report);
  ASSERT_EQ(audited.exit_code, 0) << audited.output;

  const nlohmann::json audit_json = read_json(audit_report);
  EXPECT_EQ(audit_json.at("gdp"), train_report.at("gdp"));
  EXPECT_EQ(audit_json.at("acc"), train_report.at("acc"));
  EXPECT_EQ(audit_json.at("eipm"), train_report.at("eipm"));
  EXPECT_EQ(audit_json.at("mi_z_s"), train_report.at("mi_z_s"));
}

}  // namespace
