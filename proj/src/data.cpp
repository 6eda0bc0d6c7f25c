#include "frem/data.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "frem/rng.hpp"

namespace frem {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t column) {
  const std::string text = trim(raw);
  if (text.empty()) throw CsvParseError("empty cell", row, column);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    throw CsvParseError("cell '" + text + "' is not a number", row, column);
  }
  if (!std::isfinite(value)) {
    throw CsvParseError("cell '" + text + "' is not finite", row, column);
  }
  return value;
}

SampleBatch take_rows(const SampleBatch& batch, const std::vector<Eigen::Index>& rows) {
  SampleBatch out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), batch.d());
  out.S.resize(static_cast<Eigen::Index>(rows.size()));
  if (batch.Y) out.Y.emplace(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = batch.X.row(rows[i]);
    out.S(static_cast<Eigen::Index>(i)) = batch.S(rows[i]);
    if (batch.Y) (*out.Y)(static_cast<Eigen::Index>(i)) = (*batch.Y)(rows[i]);
  }
  return out;
}

}  // namespace

CsvParseError::CsvParseError(const std::string& message, std::size_t row, std::size_t column)
    : std::runtime_error("csv parse error at row " + std::to_string(row) + ", column " +
                         std::to_string(column) + ": " + message),
      row(row),
      column(column) {}

void SampleBatch::validate() const {
  if (X.rows() != S.size()) throw std::invalid_argument("SampleBatch: X and S row counts differ");
  if (Y && Y->size() != X.rows()) throw std::invalid_argument("SampleBatch: Y row count differs");
  if (!X.allFinite() || !S.allFinite() || (Y && !Y->allFinite())) {
    throw std::invalid_argument("SampleBatch: non-finite values");
  }
}

SampleBatch load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw CsvParseError("missing header row", 1, 1);
  const std::vector<std::string> header = split_line(line);

  // Map header names to column roles.
  std::vector<int> x_index_of(header.size(), -1);
  int s_column = -1;
  int y_column = -1;
  int d = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == "s") {
      if (s_column >= 0) throw CsvParseError("duplicate column 's'", 1, c + 1);
      s_column = static_cast<int>(c);
    } else if (name == "y") {
      if (y_column >= 0) throw CsvParseError("duplicate column 'y'", 1, c + 1);
      y_column = static_cast<int>(c);
    } else if (name.size() > 1 && name[0] == 'x' &&
               name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int idx = std::stoi(name.substr(1));
      x_index_of[c] = idx;
      d = std::max(d, idx + 1);
    } else {
      throw CsvParseError("unexpected column '" + name + "' (expected x<k>, s or y)", 1, c + 1);
    }
  }
  if (s_column < 0) throw CsvParseError("missing required column 's'", 1, 1);
  std::vector<bool> seen(d, false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (x_index_of[c] >= 0) {
      if (seen[x_index_of[c]]) throw CsvParseError("duplicate feature column", 1, c + 1);
      seen[x_index_of[c]] = true;
    }
  }
  for (int k = 0; k < d; ++k) {
    if (!seen[k]) throw CsvParseError("feature columns are not contiguous: missing x" +
                                      std::to_string(k), 1, 1);
  }

  std::vector<std::vector<double>> x_rows;
  std::vector<double> s_values;
  std::vector<double> y_values;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw CsvParseError("expected " + std::to_string(header.size()) + " cells, got " +
                          std::to_string(cells.size()), row_number, cells.size());
    }
    std::vector<double> x_row(d, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double value = parse_cell(cells[c], row_number, c + 1);
      if (static_cast<int>(c) == s_column) {
        s_values.push_back(value);
      } else if (static_cast<int>(c) == y_column) {
        y_values.push_back(value);
      } else {
        x_row[x_index_of[c]] = value;
      }
    }
    x_rows.push_back(std::move(x_row));
  }
  if (x_rows.empty()) throw CsvParseError("no data rows", row_number + 1, 1);

  SampleBatch batch;
  batch.X.resize(static_cast<Eigen::Index>(x_rows.size()), d);
  batch.S.resize(static_cast<Eigen::Index>(x_rows.size()));
  for (std::size_t i = 0; i < x_rows.size(); ++i) {
    for (int c = 0; c < d; ++c) batch.X(static_cast<Eigen::Index>(i), c) = x_rows[i][c];
    batch.S(static_cast<Eigen::Index>(i)) = s_values[i];
  }
  if (y_column >= 0) {
    batch.Y.emplace(static_cast<Eigen::Index>(y_values.size()));
    for (std::size_t i = 0; i < y_values.size(); ++i) {
      (*batch.Y)(static_cast<Eigen::Index>(i)) = y_values[i];
    }
  }
  return batch;
}

void write_csv(const SampleBatch& batch, const std::string& path) {
  batch.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");

  for (Eigen::Index c = 0; c < batch.d(); ++c) out << 'x' << c << ',';
  out << 's';
  if (batch.Y) out << ",y";
  out << '\n';

  char buffer[64];
  const auto emit = [&](double v) {
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    out << buffer;
  };
  for (Eigen::Index i = 0; i < batch.n(); ++i) {
    for (Eigen::Index c = 0; c < batch.d(); ++c) {
      emit(batch.X(i, c));
      out << ',';
    }
    emit(batch.S(i));
    if (batch.Y) {
      out << ',';
      emit((*batch.Y)(i));
    }
    out << '\n';
  }
}

std::pair<SampleBatch, ScalingParams> minmax_scale(const SampleBatch& batch) {
  batch.validate();
  if (batch.n() < 1) throw std::invalid_argument("minmax_scale: empty batch");

  ScalingParams params;
  params.x_min = batch.X.colwise().minCoeff();
  params.x_max = batch.X.colwise().maxCoeff();
  params.s_min = batch.S.minCoeff();
  params.s_max = batch.S.maxCoeff();
  for (Eigen::Index c = 0; c < batch.d(); ++c) {
    if (params.x_max(c) <= params.x_min(c)) {
      params.constant_columns.push_back("x" + std::to_string(c));
    }
  }
  if (params.s_max <= params.s_min) params.constant_columns.emplace_back("s");
  return {apply_scaling(batch, params), params};
}

SampleBatch apply_scaling(const SampleBatch& batch, const ScalingParams& params) {
  batch.validate();
  if (params.x_min.size() != batch.d()) {
    throw std::invalid_argument("apply_scaling: parameter dimension mismatch");
  }
  SampleBatch out = batch;
  for (Eigen::Index c = 0; c < batch.d(); ++c) {
    const double range = params.x_max(c) - params.x_min(c);
    if (range > 0.0) {
      out.X.col(c) = (batch.X.col(c).array() - params.x_min(c)) / range;
    } else {
      out.X.col(c).setZero();
    }
  }
  const double s_range = params.s_max - params.s_min;
  if (s_range > 0.0) {
    out.S = (batch.S.array() - params.s_min) / s_range;
  } else {
    out.S.setZero();
  }
  return out;
}

std::pair<SampleBatch, SampleBatch> split(const SampleBatch& batch, double train_fraction,
                                          double test_fraction, std::uint64_t seed) {
  batch.validate();
  if (!(train_fraction > 0.0) || !(test_fraction > 0.0) ||
      std::abs(train_fraction + test_fraction - 1.0) > 1e-12) {
    throw std::invalid_argument("split: fractions must be positive and sum to 1");
  }

  const Eigen::Index n = batch.n();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = Rng(seed).derive(0x73706c6974ULL);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  const auto n_train = static_cast<Eigen::Index>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) throw std::invalid_argument("split: a partition is empty");

  const std::vector<Eigen::Index> train_rows(order.begin(), order.begin() + n_train);
  const std::vector<Eigen::Index> test_rows(order.begin() + n_train, order.end());
  return {take_rows(batch, train_rows), take_rows(batch, test_rows)};
}

}  // namespace frem
