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

#ifndef GRAVCOMP_TOOLS_COMMANDS_HPP_
#define GRAVCOMP_TOOLS_COMMANDS_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/approx.hpp"
#include "gravcomp/model.hpp"

namespace gravcomp::cli {

struct GlobalOptions {
  std::filesystem::path robot;  ///< empty selects the built-in preset
  std::filesystem::path out = ".";
  std::optional<Eigen::Vector3d> gravity;
};

struct GridOptions {
  std::array<int, 3> counts = {13, 9, 9};

  GridSpec spec() const;
};

struct CompareOptions {
  GridOptions grid;
  bool train = true;
  TrainConfig train_config;
  std::vector<double> shoulder_angles = {0.5, 1.0, 1.5};  ///< [rad]
};

struct TrainOptions {
  GridOptions grid;
  TrainConfig config;
  std::vector<int> joints = {2, 3, 4};  ///< 1-based
};

struct SimulateOptions {
  std::filesystem::path scenario;
  bool plot = true;
};

RobotModel load_model(const GlobalOptions& global);

int cmd_robot(const GlobalOptions& global, std::ostream& out);
int cmd_gravload(const GlobalOptions& global, const std::vector<double>& q,
                 std::ostream& out);
int cmd_calibrate(const GlobalOptions& global, std::ostream& out);
int cmd_compare(const GlobalOptions& global, const CompareOptions& options,
                std::ostream& out);
int cmd_train(const GlobalOptions& global, const TrainOptions& options,
              std::ostream& out);
int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options,
                 std::ostream& out);

}  // namespace gravcomp::cli

#endif  // GRAVCOMP_TOOLS_COMMANDS_HPP_
