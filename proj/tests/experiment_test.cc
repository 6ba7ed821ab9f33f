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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfdro/error.h"
#include "cfdro/experiment.h"
#include "test_util.h"

namespace cfdro {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("cfdro_experiment_test_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  json Config(const std::string& out) const {
    return {{"version", kExperimentSchemaVersion},
            {"datasets", {"lin"}},
            {"trainers", {{{"kind", "erm"}}}},
            {"seeds", {0, 1}},
            {"n", 200},
            {"optimizer", {{"epochs", 2}}},
            {"output_dir", (root_ / out).string()}};
  }

  static std::string Slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    return text.str();
  }

  fs::path root_;
};

TEST_F(ExperimentTest, ParsesConfig) {
  json doc = Config("a");
  doc["radii"] = {0.1};
  doc["metric_norm"] = "l2";
  doc["trainers"] = {{{"kind", "cdro_closed"}, {"label", "CDRO"}, {"delta", 0.05}},
                     {{"kind", "cdro_first_order"}, {"loss", "log_exponential"}},
                     {{"kind", "ross"}, {"norm", "linf"}, {"optimizer", {{"epochs", 7}}}}};
  const ExperimentConfig cfg = ExperimentConfigFromJson(doc);
  ASSERT_EQ(cfg.trainers.size(), 3u);
  EXPECT_EQ(cfg.trainers[0].DisplayName(), "CDRO");
  EXPECT_EQ(cfg.trainers[0].delta, 0.05);
  EXPECT_EQ(cfg.trainers[0].norm.kind(), NormSpec::Kind::kL2);
  EXPECT_EQ(cfg.trainers[1].power, 2.0);
  EXPECT_EQ(cfg.trainers[2].norm.kind(), NormSpec::Kind::kLinf);
  EXPECT_EQ(cfg.trainers[2].optimizer.epochs, 7);
  EXPECT_EQ(cfg.trainers[1].optimizer.epochs, 2);
  EXPECT_EQ(cfg.radii, std::vector<double>{0.1});
  EXPECT_EQ(cfg.n, 200);
}

TEST_F(ExperimentTest, RejectsBadConfigs) {
  json doc = Config("a");
  doc["seeds"] = {1, 1};
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  doc = Config("a");
  doc["trainers"] = {{{"kind", "svm"}}};
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  doc = Config("a");
  doc.erase("datasets");
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  doc = Config("a");
  doc["version"] = "experiment/9";
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  doc = Config("a");
  doc["trainers"] = {{{"kind", "erm"}}, {{"kind", "erm"}}};
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  doc = Config("a");
  doc["radii"] = {-0.1};
  EXPECT_THROW(ExperimentConfigFromJson(doc), SchemaError);
  EXPECT_THROW(LoadExperimentConfig((root_ / "absent.json").string()), Error);
}

TEST_F(ExperimentTest, WritesOneJsonPerRunAndAggregates) {
  const ExperimentConfig cfg = ExperimentConfigFromJson(Config("out"));
  const ExperimentSummary summary = RunExperiment(cfg);
  ASSERT_EQ(summary.runs.size(), 2u);
  EXPECT_FALSE(summary.any_trainer_failed);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root_ / "out" / "runs")) {
    const json run = json::parse(Slurp(entry.path()));
    EXPECT_EQ(run.at("version"), kReportSchemaVersion);
    EXPECT_TRUE(run.at("ok").get<bool>());
    ++files;
  }
  EXPECT_EQ(files, 2);
  for (const char* name : {"aggregate.csv", "aggregate.json", "report.md", "long.csv"}) {
    EXPECT_TRUE(fs::exists(root_ / "out" / name)) << name;
  }
  const std::string csv = Slurp(root_ / "out" / "aggregate.csv");
  EXPECT_NE(csv.find("U_0.05_std"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST_F(ExperimentTest, RepeatIsByteIdentical) {
  RunExperiment(ExperimentConfigFromJson(Config("first")));
  RunExperiment(ExperimentConfigFromJson(Config("second")));
  EXPECT_EQ(Slurp(root_ / "first" / "aggregate.csv"), Slurp(root_ / "second" / "aggregate.csv"));
}

TEST_F(ExperimentTest, MarkdownHasOneRowPerTrainer) {
  json doc = Config("md");
  doc["trainers"] = {{{"kind", "erm"}}, {{"kind", "cdro_closed"}, {"delta", 0.05}}};
  RunExperiment(ExperimentConfigFromJson(doc));
  const std::string md = Slurp(EmitReport((root_ / "md").string(), "md"));
  EXPECT_NE(md.find("| erm |"), std::string::npos) << md;
  EXPECT_NE(md.find("| cdro_closed |"), std::string::npos) << md;
  EXPECT_NE(md.find("**"), std::string::npos);
  const json agg = json::parse(Slurp(EmitReport((root_ / "md").string(), "json")));
  EXPECT_EQ(agg.at("cells").size(), 2u);
  EXPECT_TRUE(agg.at("cells")[0].at("std").contains("U_0.05"));
}

TEST_F(ExperimentTest, FailedCellsAreRecorded) {
  json doc = Config("fail");
  doc["datasets"] = {"adult:" + (root_ / "absent.csv").string()};
  const ExperimentSummary summary = RunExperiment(ExperimentConfigFromJson(doc));
  ASSERT_EQ(summary.runs.size(), 2u);
  EXPECT_FALSE(summary.runs[0].ok);
  EXPECT_FALSE(summary.runs[0].error.empty());
  EXPECT_TRUE(summary.any_trainer_failed);
}

TEST_F(ExperimentTest, RealDataFixturesRun) {
  json doc = Config("real");
  doc["datasets"] = {"adult:" + testing::Fixture("adult_small.csv"),
                     "compas:" + testing::Fixture("compas_small.csv")};
  doc["seeds"] = {0};
  doc["trainers"] = {{{"kind", "cdro_closed"}, {"delta", 0.05}}};
  const ExperimentSummary summary = RunExperiment(ExperimentConfigFromJson(doc));
  for (const auto& run : summary.runs) EXPECT_TRUE(run.ok) << run.dataset << ": " << run.error;
}

TEST_F(ExperimentTest, ReportNeedsArtifacts) {
  EXPECT_THROW(EmitReport(root_.string(), "csv"), Error);
  RunExperiment(ExperimentConfigFromJson(Config("fmt")));
  EXPECT_THROW(EmitReport((root_ / "fmt").string(), "xml"), SchemaError);
  std::ofstream(root_ / "fmt" / "manifest.json")
      << json({{"version", kReportSchemaVersion}, {"radii", {0.05}}, {"runs", json::array()}});
  EXPECT_THROW(EmitReport((root_ / "fmt").string(), "csv"), Error);
}

}  // namespace
}  // namespace cfdro
