/*
 * Copyright 2026 The cfdro Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cfdro/dataset.h"
#include "cfdro/error.h"
#include "test_util.h"

namespace cfdro {
namespace {

namespace fs = std::filesystem;
using testing::Fixture;
using testing::Vec;

class TempDir {
 public:
  TempDir()
      : path_(fs::temp_directory_path() /
              ("cfdro_dataset_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string Write(const std::string& name, const std::string& text) const {
    const fs::path file = path_ / name;
    std::ofstream(file) << text;
    return file.string();
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

// Least-squares slope of y on x.
double Slope(const Vector& x, const Vector& y) {
  const double mx = x.mean(), my = y.mean();
  return ((x.array() - mx) * (y.array() - my)).sum() / (x.array() - mx).square().sum();
}

TEST(GenerateLin, SensitiveRateAndSlope) {
  const SyntheticData lin = GenerateLin(100000, 42);
  const double rate = lin.data.features.col(0).mean();
  EXPECT_NEAR(rate, 0.5, 3 * std::sqrt(0.25 / 100000));
  EXPECT_NEAR(Slope(lin.data.features.col(0), lin.data.features.col(1)), 2.0, 0.05);
  EXPECT_EQ(lin.data.ColumnNames(), (std::vector<std::string>{"A", "X1", "X2"}));
  EXPECT_EQ(lin.data.SensitiveIndices(), std::vector<int>{0});
}

TEST(GenerateLin, SameSeedSameData) {
  const SyntheticData a = GenerateLin(300, 5);
  const SyntheticData b = GenerateLin(300, 5);
  EXPECT_EQ(a.data.features, b.data.features);
  EXPECT_EQ(a.data.labels, b.data.labels);
  EXPECT_NE(GenerateLin(300, 6).data.features, a.data.features);
}

TEST(GenerateLin, RowsFollowTheEquations) {
  const SyntheticData lin = GenerateLin(50, 1);
  for (long i = 0; i < 50; ++i) {
    const Vector v = lin.data.Row(i);
    EXPECT_TRUE(v[0] == 0.0 || v[0] == 1.0);
    const Vector u = Abduct(lin.scm, v);
    EXPECT_NEAR(v[2], v[0] - v[1] + u[2], 1e-12);
  }
}

TEST(GenerateExample1, DataIsDeterministic) {
  const auto a = GenerateExample1Data(Example1Model::kLinear, 100, 3);
  EXPECT_EQ(a.data.features, GenerateExample1Data(Example1Model::kLinear, 100, 3).data.features);
  EXPECT_EQ(a.data.ColumnNames(), (std::vector<std::string>{"G", "E", "I"}));
}

TEST(LoadCsv, AdultFixture) {
  const Dataset adult = LoadCsv(Fixture("adult_small.csv"), "adult");
  EXPECT_EQ(adult.size(), 240);
  EXPECT_EQ(adult.ColumnNames(),
            (std::vector<std::string>{"sex", "age", "native-country", "marital-status",
                                      "education-num", "hours-per-week"}));
  EXPECT_EQ(adult.SensitiveIndices(), std::vector<int>{0});
  // First row: 17, Married-AF-spouse, Male, United-States, <=50K.
  EXPECT_EQ(adult.Row(0), Vec({1, 17, 1, 1, 8, 37}));
  EXPECT_EQ(adult.labels[0], -1.0);
  EXPECT_EQ(adult.labels[1], 1.0);
}

TEST(LoadCsv, CompasFixture) {
  const Dataset compas = LoadCsv(Fixture("compas_small.csv"), "compas");
  EXPECT_EQ(compas.size(), 200);
  EXPECT_EQ(compas.ColumnNames(),
            (std::vector<std::string>{"sex", "age", "race", "priors_count"}));
  // 0,Male,44,Hispanic,7,1
  EXPECT_EQ(compas.Row(0), Vec({1, 44, 0, 7}));
  EXPECT_EQ(compas.Row(1), Vec({1, 25, 1, 5}));
  EXPECT_EQ(compas.labels[0], 1.0);
}

TEST(LoadCsv, CustomSchemaFixture) {
  const Dataset custom =
      LoadCsv(Fixture("custom_rows.csv"), "custom:" + Fixture("custom_scm.json"));
  EXPECT_EQ(custom.size(), 160);
  EXPECT_EQ(custom.ColumnNames(), (std::vector<std::string>{"g", "skill", "score"}));
  EXPECT_EQ(custom.labels[0], -1.0);
}

TEST(LoadCsv, SmallFileRoundTrips) {
  const TempDir dir;
  Dataset data;
  data.columns = {{"g", true}, {"skill", false}, {"score", false}};
  data.features.resize(3, 3);
  data.features << 0, 0.125, -1.0 / 3, 1, -2.5, 1e-7, 1, 3.75, 0.1;
  data.labels = Vec({1, -1, 1});
  const std::string path = dir.File("three.csv");
  WriteCsv(data, path, "hired");
  const Dataset back = LoadCsv(path, "custom:" + Fixture("custom_scm.json"));
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.labels, data.labels);
}

TEST(LoadCsv, MissingColumnIsNamed) {
  const TempDir dir;
  const std::string path = dir.Write("nosex.csv", "age,race,priors_count,two_year_recid\n"
                                                  "30,Caucasian,1,0\n");
  try {
    LoadCsv(path, "compas");
    FAIL() << "missing column accepted";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("'sex'"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, BadCellReportsRow) {
  const TempDir dir;
  const std::string path = dir.Write("bad.csv", "sex,age,race,priors_count,two_year_recid\n"
                                                "Male,30,Caucasian,1,0\n"
                                                "Female,abc,Caucasian,1,0\n");
  try {
    LoadCsv(path, "compas");
    FAIL() << "unparseable cell accepted";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'age'"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, RejectsEmptyAndUnknown) {
  const TempDir dir;
  EXPECT_THROW(LoadCsv(dir.Write("empty.csv", ""), "compas"), SchemaError);
  EXPECT_THROW(LoadCsv(dir.Write("header.csv", "sex,age\n"), "compas"), SchemaError);
  EXPECT_THROW(LoadCsv(dir.File("absent.csv"), "compas"), SchemaError);
  EXPECT_THROW(LoadCsv(Fixture("compas_small.csv"), "german"), SchemaError);
  const std::string question = dir.Write(
      "q.csv",
      "age,education-num,marital-status,sex,hours-per-week,native-country,income\n"
      "30,10,Never-married,Male,40,?,<=50K\n");
  EXPECT_THROW(LoadCsv(question, "adult"), SchemaError);
}

TEST(FitLinearScm, RecoversLinCoefficients) {
  const SyntheticData lin = GenerateLin(100000, 7);
  const Scm fitted = FitLinearScm(lin.data, LinGraph());
  const auto& x1 = fitted.node(1).equation.coefficients();
  const auto& x2 = fitted.node(2).equation.coefficients();
  ASSERT_EQ(x1.size(), 1u);
  ASSERT_EQ(x2.size(), 2u);
  EXPECT_NEAR(x1[0], 2.0, 0.05);
  EXPECT_NEAR(x2[0], 1.0, 0.05);
  EXPECT_NEAR(x2[1], -1.0, 0.05);
}

TEST(FitLinearScm, ExactLinearDataIsExact) {
  SyntheticData lin = GenerateLin(200, 8);
  lin.data.features.col(1) = 3.0 * lin.data.features.col(0).array() + 0.5;
  lin.data.features.col(1) += Vector::LinSpaced(200, -1, 1);
  lin.data.features.col(2) = -1.5 * lin.data.features.col(1).array() + 2.0;
  CausalGraph graph = LinGraph();
  graph.parents[2] = {"X1"};
  const Scm fitted = FitLinearScm(lin.data, graph);
  EXPECT_NEAR(fitted.node(2).equation.coefficients()[0], -1.5, 1e-10);
}

TEST(FitLinearScm, RejectsRankDeficientDesign) {
  SyntheticData lin = GenerateLin(200, 9);
  lin.data.features.col(1) = 2.0 * lin.data.features.col(0);
  EXPECT_THROW(FitLinearScm(lin.data, LinGraph()), ScmError);
}

TEST(FitLinearScm, GraphsMatchLoaders) {
  const Dataset adult = LoadCsv(Fixture("adult_small.csv"), "adult");
  EXPECT_EQ(AdultGraph().nodes, adult.ColumnNames());
  EXPECT_TRUE(FitLinearScm(Standardize(adult), AdultGraph()).is_linear());
  const Dataset compas = LoadCsv(Fixture("compas_small.csv"), "compas");
  EXPECT_EQ(CompasGraph().nodes, compas.ColumnNames());
  EXPECT_TRUE(FitLinearScm(Standardize(compas), CompasGraph()).is_linear());
}

TEST(Standardize, ZeroMeanUnitScale) {
  const SyntheticData lin = GenerateLin(1000, 10);
  const Dataset z = Standardize(lin.data);
  for (long j = 1; j < 3; ++j) {
    const auto col = z.features.col(j).array();
    EXPECT_NEAR(col.mean(), 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt((col - col.mean()).square().mean()), 1.0, 1e-12);
  }
  EXPECT_EQ(z.features.col(0), lin.data.features.col(0));
}

TEST(Standardize, InverseAndReuse) {
  const SyntheticData lin = GenerateLin(500, 11);
  const Dataset z = Standardize(lin.data);
  EXPECT_TRUE(Unstandardize(z).features.isApprox(lin.data.features, 1e-12));
  const Dataset again = ApplyStandardization(lin.data, z.standardization);
  EXPECT_EQ(again.features, z.features);
  EXPECT_NEAR(Standardize(z).features.cwiseAbs().maxCoeff(),
              z.features.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StratifiedSplit, KeepsLabelBalance) {
  const SyntheticData lin = GenerateLin(2000, 12);
  const Split split = StratifiedSplit(lin.data, 0.2, 3);
  EXPECT_EQ(split.train.size() + split.test.size(), 2000);
  EXPECT_NEAR(static_cast<double>(split.test.size()), 400.0, 1.0);
  EXPECT_NEAR(split.test.PositiveRate(), lin.data.PositiveRate(), 0.005);
  const Split again = StratifiedSplit(lin.data, 0.2, 3);
  EXPECT_EQ(again.test.features, split.test.features);
  EXPECT_THROW(StratifiedSplit(lin.data, 1.0, 3), Error);
}

}  // namespace
}  // namespace cfdro
