#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override
  {
    dir_ = fs::path(::testing::TempDir()) /
           ("chromainv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the tool inside the test directory and returns its exit code.
  int run(const std::string& args, std::string* stdout_text = nullptr) const
  {
    const fs::path out = dir_ / "stdout.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" + CHROMAINV_CLI_PATH + "' " + args + " > '" +
                            out.string() + "' 2> '" + (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    if (stdout_text)
      *stdout_text = read_file(out);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static constexpr const char* kColumn = " --cells 30 --horizon 600 --n-time-points 60";

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsCleanly)
{
  std::string text;
  EXPECT_EQ(run("--help", &text), 0);
  EXPECT_NE(text.find("generate"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitWithTwo)
{
  EXPECT_EQ(run("generate"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("generate --n 3 --out ds --cells abc"), 2);
}

TEST_F(CliTest, EmptyDatasetIsRejectedWithoutFiles)
{
  EXPECT_EQ(run("generate --n 0 --out ds"), 2);
  EXPECT_FALSE(fs::exists(dir_ / "ds"));
}

TEST_F(CliTest, GenerateIsByteIdenticalUnderOneSeed)
{
  ASSERT_EQ(run(std::string("--seed 7 generate --n 5 --out a --plot-data") + kColumn), 0);
  ASSERT_EQ(run(std::string("--seed 7 generate --n 5 --out b --plot-data") + kColumn), 0);
  for (const char* f : {"samples.f64", "meta.json"})
    EXPECT_EQ(read_file(dir_ / "a" / f), read_file(dir_ / "b" / f)) << f;
  int plots = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a" / "plot")) {
    ++plots;
    EXPECT_EQ(read_file(e.path()), read_file(dir_ / "b" / "plot" / e.path().filename()));
  }
  EXPECT_EQ(plots, 4);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.json"));
  ASSERT_EQ(run(std::string("--seed 8 generate --n 5 --out c") + kColumn), 0);
  EXPECT_NE(read_file(dir_ / "a" / "samples.f64"), read_file(dir_ / "c" / "samples.f64"));
}

TEST_F(CliTest, TrainEvaluatePredictPipeline)
{
  ASSERT_EQ(run(std::string("--seed 3 generate --n 20 --out ds --plot-data") + kColumn), 0);
  const std::string train = "--seed 3 train --data ds --out m --hidden 6 --epochs 3 --optimizer adam";
  ASSERT_EQ(run(train), 0);
  for (const char* f : {"model.json", "norm_stats.json", "history.csv", "split.json", "metrics.json",
                        "train_info.json", "config.json"})
    EXPECT_TRUE(fs::exists(dir_ / "m" / f)) << f;
  const auto split = nlohmann::json::parse(read_file(dir_ / "m" / "split.json"));
  EXPECT_EQ(split["counts"]["train"], 12);
  EXPECT_EQ(split["counts"]["validation"], 4);
  EXPECT_EQ(split["counts"]["test"], 4);

  ASSERT_EQ(run(train.substr(0, train.find("--out")) + "--out m2 --hidden 6 --epochs 3 --optimizer adam"), 0);
  EXPECT_EQ(read_file(dir_ / "m" / "split.json"), read_file(dir_ / "m2" / "split.json"));
  EXPECT_EQ(read_file(dir_ / "m" / "model.json"), read_file(dir_ / "m2" / "model.json"));

  ASSERT_EQ(run("evaluate --model m --data ds --out ev --noise normal:0.04:0.1"), 0);
  std::ifstream csv(dir_ / "ev" / "r2.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, "entry,r2");
  std::getline(csv, line);
  EXPECT_EQ(line.substr(0, 8), "overall,");
  while (std::getline(csv, line))
    ++rows;
  EXPECT_EQ(rows, 8);

  const fs::path plot = fs::directory_iterator(dir_ / "ds" / "plot")->path();
  const std::string predict = "predict --model m --chromatogram '" + plot.string() + "' --injection 5,15";
  std::string first;
  std::string second;
  ASSERT_EQ(run(predict, &first), 0);
  ASSERT_EQ(run(predict, &second), 0);
  EXPECT_EQ(first, second);
  std::istringstream lines(first);
  std::string name;
  double value = 0.0;
  int entries = 0;
  while (lines >> name >> value) {
    ++entries;
    EXPECT_GT(value, 0.0);
    EXPECT_LT(value, 100.0);
  }
  EXPECT_EQ(entries, 8);
}

TEST_F(CliTest, EvaluateRejectsForeignGridWithoutRegrid)
{
  ASSERT_EQ(run(std::string("generate --n 10 --out ds") + kColumn), 0);
  ASSERT_EQ(run("generate --n 10 --out other --cells 30 --horizon 600 --n-time-points 40"), 0);
  ASSERT_EQ(run("train --data ds --out m --hidden 4 --epochs 1"), 0);
  EXPECT_EQ(run("evaluate --model m --data other --out ev"), 2);
  EXPECT_EQ(run("evaluate --model m --data other --out ev --regrid"), 0);
}

TEST_F(CliTest, VariationalFitAndMissingObservation)
{
  ASSERT_EQ(run(std::string("simulate --params 9.54,0.91,9.53,1,2.74,0.43,1.8,0.08 --injection 5,15 --out s") +
                " --cells 30 --horizon 2400 --n-time-points 100"),
            0);
  ASSERT_TRUE(fs::exists(dir_ / "s" / "chromatogram.csv"));
  ASSERT_EQ(run("fit-variational --obs s/chromatogram.csv:5:15 --out fv --fit-cells 30 --max-iterations 10"
                " --horizon 2400 --n-time-points 100"),
            0);
  const auto report = nlohmann::json::parse(read_file(dir_ / "fv" / "fit_report.json"));
  EXPECT_EQ(report["trace"].size(), report["iterations"].get<std::size_t>() + 1);
  EXPECT_EQ(run("fit-variational --obs nowhere.csv:5:15 --out fv2"), 4);
  EXPECT_EQ(run("fit-variational --obs s/chromatogram.csv:5 --out fv3"), 2);
}

TEST_F(CliTest, ConfigFileIsValidated)
{
  std::ofstream(dir_ / "bad.json") << R"({"training": {"epochz": 3}})";
  EXPECT_EQ(run("--config bad.json generate --n 2 --out ds"), 2);
  std::ofstream(dir_ / "good.json") << R"({"seed": 4, "datagen": {"n": 2},
    "column": {"n_cells": 30, "horizon": 600, "n_time_points": 60}})";
  ASSERT_EQ(run("--config good.json generate --out ds"), 0);
  const auto echo = nlohmann::json::parse(read_file(dir_ / "ds" / "config.json"));
  EXPECT_EQ(echo["config"]["seed"], 4);
  EXPECT_EQ(echo["config"]["datagen"]["n"], 2);
}

} // namespace
