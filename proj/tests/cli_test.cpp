// Copyright 2026 The gravcomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built command-line tool as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

#include <fmt/format.h>

#include "gravcomp/dynamics.hpp"
#include "gravcomp/model.hpp"
#include "test_support.hpp"

namespace gravcomp {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;  ///< stdout and stderr
};

Result run_cli(const std::string& args) {
  const std::string command = std::string(GRAVCOMP_CLI) + " " + args + " 2>&1";
  Result result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gravcomp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string source_path(const std::string& relative) {
  return std::string(GRAVCOMP_SOURCE_DIR) + "/" + relative;
}

std::vector<double> torques(const std::string& output) {
  static const std::regex line(R"(tau\d+ = (\S+) N m)");
  std::vector<double> out;
  for (std::sregex_iterator it(output.begin(), output.end(), line), end; it != end;
       ++it) {
    out.push_back(std::stod((*it)[1]));
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(CliTest, HelpSucceeds) {
  const auto r = run_cli("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("gravload"), std::string::npos);
}

TEST(CliTest, UnknownSubcommandIsInputError) {
  EXPECT_EQ(run_cli("fly").code, 1);
  EXPECT_EQ(run_cli("").code, 1);
}

TEST(CliTest, HangingPoseLoadsNothingOnOuterJoints) {
  const auto r = run_cli("gravload 0,3.141592653589793,0,0");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto tau = torques(r.output);
  ASSERT_EQ(tau.size(), 4u);
  EXPECT_LT(std::abs(tau[2]), 1e-12);
  EXPECT_LT(std::abs(tau[3]), 1e-12);
  EXPECT_NE(r.output.find("N m"), std::string::npos);
}

TEST(CliTest, ZeroGravityOverride) {
  const auto r = run_cli("--gravity 0,0,0 gravload 0,2,0.5,1");
  ASSERT_EQ(r.code, 0) << r.output;
  for (double t : torques(r.output)) EXPECT_EQ(t, 0.0);
}

TEST(CliTest, GravloadMatchesLibrary) {
  const auto model = exoskeleton_default();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = testing::random_q(rng, 4);
    const auto r = run_cli(fmt::format("gravload -- {:.17g},{:.17g},{:.17g},{:.17g}",
                                       q[0], q[1], q[2], q[3]));
    ASSERT_EQ(r.code, 0) << r.output;
    const auto tau = torques(r.output);
    const auto expected = grav_load(model, q);
    ASSERT_EQ(tau.size(), 4u);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(tau[static_cast<std::size_t>(j)], expected[j]);
  }
}

TEST(CliTest, WrongPoseLengthIsInputError) {
  const auto r = run_cli("gravload 0,1,2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("4 joints"), std::string::npos) << r.output;
}

TEST(CliTest, RobotDescriptionRoundTrips) {
  const auto dir = scratch_dir("robot");
  const auto r = run_cli("robot");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(load_robot_config(r.output), exoskeleton_default());
  EXPECT_EQ(r.output, testing::read_file(source_path("config/exoskeleton.ini")));
  const auto again = run_cli("--robot " + source_path("config/exoskeleton.ini") + " robot");
  EXPECT_EQ(again.output, r.output);
}

TEST(CliTest, BadRobotFileNamesField) {
  const auto dir = scratch_dir("bad_robot");
  auto text = to_config_text(exoskeleton_default());
  text.replace(text.find("mass = 0.8"), 10, "mass = -0.8");
  std::ofstream(dir / "robot.ini") << text;
  const auto r = run_cli("--robot " + (dir / "robot.ini").string() + " gravload 0,0,0,0");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("link.2.mass"), std::string::npos) << r.output;
}

TEST(CliTest, CalibrationPrintsMap) {
  const auto r = run_cli("calibrate");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("joint 2: sign -1"), std::string::npos) << r.output;
}

TEST(CliTest, CalibrationFailureIsNumerical) {
  auto links = exoskeleton_default().links();
  for (auto& link : links) link.dynamics.com = {-link.dh.a / 2, 0.0, 0.0};
  const auto dir = scratch_dir("mid_com");
  std::ofstream(dir / "robot.ini") << to_config_text(RobotModel(links, {0, 0, -9.8}));
  const auto r = run_cli("--robot " + (dir / "robot.ini").string() + " calibrate");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("best residual"), std::string::npos) << r.output;
}

TEST(CliTest, SmallGridComparisonWithoutTraining) {
  const auto dir = scratch_dir("compare_small");
  const auto r = run_cli("--out " + dir.string() + " compare --grid 2,2,2 --no-train");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("8 poses"), std::string::npos);
  const auto rows = read_csv(dir / "compare_residuals.csv");
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].size(), 10u);
  const auto summary = read_csv(dir / "compare_summary.csv");
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_EQ(summary[1][2], "");
}

TEST(CliTest, FullComparisonReproducesOrdering) {
  const auto dir = scratch_dir("compare_full");
  const auto r = run_cli("--out " + dir.string() + " compare");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("1053 poses"), std::string::npos);
  EXPECT_NE(r.output.find("theta1"), std::string::npos);
  const auto summary = read_csv(dir / "compare_summary.csv");
  ASSERT_EQ(summary.size(), 4u);
  for (std::size_t j = 1; j < 4; ++j) {
    const double law = std::stod(summary[j][1]);
    const double net = std::stod(summary[j][2]);
    EXPECT_LT(law, 1e-10);
    EXPECT_GE(net, 100 * law);
    EXPECT_LE(net, 1e-2);
  }
  EXPECT_EQ(read_csv(dir / "compare_residuals.csv").size(), 1054u);
}

TEST(CliTest, TrainingIsReproducible) {
  const auto a = scratch_dir("train_a");
  const auto b = scratch_dir("train_b");
  for (const auto& dir : {a, b}) {
    const auto r = run_cli("--out " + dir.string() + " train --epochs 10");
    ASSERT_EQ(r.code, 0) << r.output;
  }
  for (const char* name : {"net_joint2.ini", "net_joint3.ini", "net_joint4.ini",
                           "train_rmse.csv"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(testing::read_file((a / name).string()),
              testing::read_file((b / name).string()))
        << name;
  }
  const auto history = read_csv(a / "train_rmse.csv");
  ASSERT_EQ(history.size(), 11u);
  EXPECT_EQ(history[0], (std::vector<std::string>{"epoch", "joint2", "joint3", "joint4"}));
  const auto log = testing::read_file((a / "train_log.txt").string());
  EXPECT_NE(log.find("joint 4: rmse"), std::string::npos);
  EXPECT_NE(log.find(" s -> net_joint4.ini"), std::string::npos);
}

TEST(CliTest, UnderdeterminedTrainingIsNumerical) {
  const auto dir = scratch_dir("train_small");
  const auto r = run_cli("--out " + dir.string() + " train --grid 2,2,2");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("singular"), std::string::npos) << r.output;
}

TEST(CliTest, HoldScenarioWritesTraceReportAndPlot) {
  const auto dir = scratch_dir("sim_hold");
  const auto r =
      run_cli("--out " + dir.string() + " simulate " + source_path("config/scenarios/hold.ini"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto trace = read_csv(dir / "trace.csv");
  ASSERT_EQ(trace.size(), 60002u);
  EXPECT_EQ(trace[0].size(), 17u);
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
  const auto svg = testing::read_file((dir / "trace.svg").string());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  const std::regex drift(R"(max drift \[rad\]: (\S+), (\S+), (\S+), (\S+))");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.output, m, drift)) << r.output;
  for (int j = 1; j <= 4; ++j) EXPECT_LT(std::stod(m[j]), 1e-3);
}

TEST(CliTest, SimulationOutputIsByteIdentical) {
  const auto a = scratch_dir("sim_a");
  const auto b = scratch_dir("sim_b");
  const auto scenario = source_path("config/scenarios/disturbance.ini");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(run_cli("--out " + dir.string() + " simulate --no-plot " + scenario).code, 0);
  }
  EXPECT_FALSE(fs::exists(a / "trace.svg"));
  EXPECT_EQ(testing::read_file((a / "trace.csv").string()),
            testing::read_file((b / "trace.csv").string()));
}

TEST(CliTest, ThirteenPoseScheduleReportsThirteenHolds) {
  const auto dir = scratch_dir("sim_13");
  const auto r = run_cli("--out " + dir.string() + " simulate --no-plot " +
                         source_path("config/scenarios/thirteen_poses.ini"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("hold segments: 13"), std::string::npos) << r.output;
}

TEST(CliTest, MalformedScenarioNamesField) {
  const auto dir = scratch_dir("sim_bad");
  std::ofstream(dir / "bad.ini") << "[scenario]\ncontroller = static\nq0 = 0, 2, 0.5, 1\n";
  const auto r = run_cli("--out " + dir.string() + " simulate " + (dir / "bad.ini").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("scenario.duration"), std::string::npos) << r.output;
}

TEST(CliTest, MissingScenarioFileIsInputError) {
  EXPECT_EQ(run_cli("simulate /nonexistent/scenario.ini").code, 1);
}

TEST(CliTest, DivergenceIsNumericalAndKeepsPrefix) {
  const auto dir = scratch_dir("sim_diverge");
  std::ofstream(dir / "spin.ini") << "[scenario]\nduration = 10\ncontroller = none\n"
                                     "q0 = 0, 2, 0.5, 1\n[disturbance.1]\nstart = 0\n"
                                     "end = 10\njoint = 4\ntorque = 9\n";
  const auto r = run_cli("--out " + dir.string() + " simulate " + (dir / "spin.ini").string());
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_GT(read_csv(dir / "trace.csv").size(), 2u);
}

}  // namespace
}  // namespace gravcomp
