#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace frem {

// The dataset unit shared by estimators, metrics and training: aligned
// features X (n x d), sensitive values S (n) and optional labels Y (n).
struct SampleBatch {
  Eigen::MatrixXd X;
  Eigen::VectorXd S;
  std::optional<Eigen::VectorXd> Y;

  [[nodiscard]] Eigen::Index n() const { return X.rows(); }
  [[nodiscard]] Eigen::Index d() const { return X.cols(); }
  void validate() const;
};

// Per-column min/max fitted on training data; apply_scaling maps held-out
// data with the same parameters. Constant columns map to zero.
struct ScalingParams {
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;
  double s_min = 0.0;
  double s_max = 1.0;
  std::vector<std::string> constant_columns;
};

struct CsvParseError : std::runtime_error {
  CsvParseError(const std::string& message, std::size_t row, std::size_t column);
  std::size_t row;
  std::size_t column;
};

// CSV schema: header row with columns x0..x{d-1}, s and optionally y, in any
// order; every cell must parse as a finite number.
SampleBatch load_csv(const std::string& path);

// Values serialized with 17 significant digits so a round trip is exact.
void write_csv(const SampleBatch& batch, const std::string& path);

std::pair<SampleBatch, ScalingParams> minmax_scale(const SampleBatch& batch);

SampleBatch apply_scaling(const SampleBatch& batch, const ScalingParams& params);

// Deterministic shuffled partition; fractions must be positive and sum to 1.
std::pair<SampleBatch, SampleBatch> split(const SampleBatch& batch, double train_fraction,
                                          double test_fraction, std::uint64_t seed);

}  // namespace frem
