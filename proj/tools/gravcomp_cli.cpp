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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gravcomp/errors.hpp"

namespace {

constexpr int kInputFailure = 1;
constexpr int kNumericalFailure = 2;

void add_grid(CLI::App* app, gravcomp::cli::GridOptions& grid) {
  app->add_option("--grid", grid.counts, "Poses per axis for joints 2, 3, 4")
      ->delimiter(',');
}

void add_training(CLI::App* app, gravcomp::TrainConfig& config) {
  app->add_option("--mfs", config.mfs_per_input, "Gaussian sets per input")
      ->capture_default_str();
  app->add_option("--epochs", config.epochs)->capture_default_str();
  app->add_option("--learn-rate", config.learn_rate)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = gravcomp::cli;
  CLI::App app{"Gravity compensation toolkit for a 4-joint arm exoskeleton"};
  app.require_subcommand(1);

  cli::GlobalOptions global;
  std::vector<double> gravity;
  app.add_option("--robot", global.robot, "Robot description (INI); default preset")
      ->check(CLI::ExistingFile);
  app.add_option("--out", global.out, "Output directory")->capture_default_str();
  app.add_option("--gravity", gravity, "Gravity vector x,y,z [m/s^2]")
      ->delimiter(',')
      ->expected(3);

  auto* robot = app.add_subcommand("robot", "Print the robot description in use");

  std::vector<double> q;
  auto* gravload = app.add_subcommand("gravload", "Gravity torques at a pose");
  gravload->add_option("q", q, "Joint angles [rad], comma separated")
      ->delimiter(',')
      ->required();

  auto* calibrate =
      app.add_subcommand("calibrate", "Find the motor-to-equation angle map");

  cli::CompareOptions compare_opts;
  bool no_train = false;
  auto* compare = app.add_subcommand(
      "compare", "RMSE of the closed-form law and a neuro-fuzzy fit against RNE");
  add_grid(compare, compare_opts.grid);
  add_training(compare, compare_opts.train_config);
  compare->add_flag("--no-train", no_train, "Skip the neuro-fuzzy fit");

  cli::TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Fit per-joint neuro-fuzzy regressors");
  add_grid(train, train_opts.grid);
  add_training(train, train_opts.config);
  train->add_option("--joints", train_opts.joints, "Joints to fit (1-based)")
      ->delimiter(',');

  cli::SimulateOptions sim_opts;
  bool no_plot = false;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("scenario", sim_opts.scenario, "Scenario (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_flag("--no-plot", no_plot, "Skip the SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputFailure;
  }
  if (!gravity.empty()) global.gravity = Eigen::Vector3d(gravity[0], gravity[1], gravity[2]);
  compare_opts.train = !no_train;
  sim_opts.plot = !no_plot;

  try {
    if (*robot) return cli::cmd_robot(global, std::cout);
    if (*gravload) return cli::cmd_gravload(global, q, std::cout);
    if (*calibrate) return cli::cmd_calibrate(global, std::cout);
    if (*compare) return cli::cmd_compare(global, compare_opts, std::cout);
    if (*train) return cli::cmd_train(global, train_opts, std::cout);
    if (*simulate) return cli::cmd_simulate(global, sim_opts, std::cout);
  } catch (const gravcomp::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputFailure;
  } catch (const gravcomp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputFailure;
  }
  return kInputFailure;
}
