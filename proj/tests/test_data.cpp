#include "frem/data.hpp"

#include <fstream>

#include <gtest/gtest.h>

#include "frem/rng.hpp"

namespace frem {
namespace {

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "/" + name; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

TEST(LoadCsv, ParsesLabeledFile) {
  const std::string path = temp_path("labeled.csv");
  write_file(path, "x0,x1,s,y\n1.0,2.0,0.1,1\n3.0,4.0,0.2,0\n5.0,6.0,0.3,1\n");
  const SampleBatch batch = load_csv(path);
  EXPECT_EQ(batch.n(), 3);
  EXPECT_EQ(batch.d(), 2);
  ASSERT_TRUE(batch.Y.has_value());
  EXPECT_EQ((*batch.Y)(0), 1.0);
  EXPECT_EQ(batch.X(1, 1), 4.0);
  EXPECT_EQ(batch.S(2), 0.3);
}

TEST(LoadCsv, LabelColumnOptional) {
  const std::string path = temp_path("unlabeled.csv");
  write_file(path, "x0,s\n1.0,0.5\n2.0,0.6\n");
  const SampleBatch batch = load_csv(path);
  EXPECT_FALSE(batch.Y.has_value());
}

TEST(LoadCsv, ColumnsInAnyOrder) {
  const std::string path = temp_path("shuffled.csv");
  write_file(path, "y,s,x1,x0\n1,0.5,2.0,1.0\n");
  const SampleBatch batch = load_csv(path);
  EXPECT_EQ(batch.X(0, 0), 1.0);
  EXPECT_EQ(batch.X(0, 1), 2.0);
}

TEST(LoadCsv, RejectsNanCellWithLocation) {
  const std::string path = temp_path("nan.csv");
  write_file(path, "x0,s\n1.0,0.5\nNaN,0.6\n");
  try {
    load_csv(path);
    FAIL() << "expected parse error";
  } catch (const CsvParseError& e) {
    EXPECT_EQ(e.row, 3u);
    EXPECT_EQ(e.column, 1u);
  }
}

TEST(LoadCsv, RejectsMalformedInput) {
  const std::string no_s = temp_path("no_s.csv");
  write_file(no_s, "x0,x1\n1.0,2.0\n");
  EXPECT_THROW(load_csv(no_s), CsvParseError);

  const std::string ragged = temp_path("ragged.csv");
  write_file(ragged, "x0,s\n1.0,0.5\n2.0\n");
  EXPECT_THROW(load_csv(ragged), CsvParseError);

  const std::string text_cell = temp_path("text.csv");
  write_file(text_cell, "x0,s\nhello,0.5\n");
  EXPECT_THROW(load_csv(text_cell), CsvParseError);

  const std::string gap = temp_path("gap.csv");
  write_file(gap, "x0,x2,s\n1.0,2.0,0.5\n");
  EXPECT_THROW(load_csv(gap), CsvParseError);

  const std::string unknown = temp_path("unknown.csv");
  write_file(unknown, "x0,weight,s\n1.0,2.0,0.5\n");
  EXPECT_THROW(load_csv(unknown), CsvParseError);
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(1);
  SampleBatch batch;
  batch.X.resize(20, 3);
  batch.S.resize(20);
  Eigen::VectorXd y(20);
  for (Eigen::Index i = 0; i < 20; ++i) {
    batch.S(i) = rng.normal() * 1e-7;
    y(i) = rng.normal() * 1e9;
    for (int c = 0; c < 3; ++c) batch.X(i, c) = rng.normal();
  }
  batch.Y = y;

  const std::string path = temp_path("roundtrip.csv");
  write_csv(batch, path);
  const SampleBatch loaded = load_csv(path);
  EXPECT_TRUE(loaded.X.isApprox(batch.X, 0.0));
  EXPECT_TRUE(loaded.S.isApprox(batch.S, 0.0));
  EXPECT_TRUE(loaded.Y->isApprox(*batch.Y, 0.0));
}

TEST(MinMaxScale, MapsToUnitInterval) {
  SampleBatch batch;
  batch.X.resize(3, 1);
  batch.X << 10.0, 20.0, 30.0;
  batch.S.resize(3);
  batch.S << 2.0, 4.0, 6.0;

  auto [scaled, params] = minmax_scale(batch);
  EXPECT_EQ(scaled.S(0), 0.0);
  EXPECT_EQ(scaled.S(1), 0.5);
  EXPECT_EQ(scaled.S(2), 1.0);
  EXPECT_EQ(scaled.X(0, 0), 0.0);
  EXPECT_EQ(scaled.X(2, 0), 1.0);

  // Stored parameters applied to a new value: s = 5 -> 0.75.
  SampleBatch fresh;
  fresh.X.resize(1, 1);
  fresh.X << 15.0;
  fresh.S.resize(1);
  fresh.S << 5.0;
  const SampleBatch mapped = apply_scaling(fresh, params);
  EXPECT_EQ(mapped.S(0), 0.75);
  EXPECT_EQ(mapped.X(0, 0), 0.25);

  // Scaling then re-applying the parameters to the original data agrees.
  EXPECT_TRUE(apply_scaling(batch, params).S.isApprox(scaled.S, 0.0));
}

TEST(MinMaxScale, ConstantColumnBecomesZeroWithWarning) {
  SampleBatch batch;
  batch.X.resize(3, 2);
  batch.X << 1.0, 5.0, 1.0, 6.0, 1.0, 7.0;
  batch.S.resize(3);
  batch.S << 0.1, 0.2, 0.3;

  auto [scaled, params] = minmax_scale(batch);
  EXPECT_EQ(scaled.X.col(0).cwiseAbs().maxCoeff(), 0.0);
  ASSERT_EQ(params.constant_columns.size(), 1u);
  EXPECT_EQ(params.constant_columns[0], "x0");
}

TEST(Split, SizesAndMultisetUnion) {
  Rng rng(2);
  SampleBatch batch;
  batch.X.resize(10, 1);
  batch.S.resize(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    batch.X(i, 0) = static_cast<double>(i);
    batch.S(i) = rng.uniform();
  }

  auto [train, test] = split(batch, 0.8, 0.2, 7);
  EXPECT_EQ(train.n(), 8);
  EXPECT_EQ(test.n(), 2);

  std::vector<double> seen;
  for (Eigen::Index i = 0; i < train.n(); ++i) seen.push_back(train.X(i, 0));
  for (Eigen::Index i = 0; i < test.n(); ++i) seen.push_back(test.X(i, 0));
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(seen[i], static_cast<double>(i));
}

TEST(Split, DeterministicPerSeed) {
  SampleBatch batch;
  batch.X = Eigen::MatrixXd::Random(30, 2);
  batch.S = Eigen::VectorXd::Random(30);
  auto [a_train, a_test] = split(batch, 0.8, 0.2, 42);
  auto [b_train, b_test] = split(batch, 0.8, 0.2, 42);
  EXPECT_TRUE(a_train.X.isApprox(b_train.X, 0.0));
  EXPECT_TRUE(a_test.X.isApprox(b_test.X, 0.0));
}

TEST(Split, RejectsBadFractions) {
  SampleBatch batch;
  batch.X = Eigen::MatrixXd::Random(2, 1);
  batch.S = Eigen::VectorXd::Random(2);
  EXPECT_THROW(split(batch, 0.7, 0.2, 1), std::invalid_argument);
  EXPECT_THROW(split(batch, 0.99, 0.01, 1), std::invalid_argument);  // empty test part
}

}  // namespace
}  // namespace frem
