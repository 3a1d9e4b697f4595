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

#ifndef GRAVCOMP_APPROX_HPP_
#define GRAVCOMP_APPROX_HPP_

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/errors.hpp"
#include "gravcomp/model.hpp"

namespace gravcomp {

struct AxisSpec {
  double min = 0.0;  ///< [rad]
  double max = 0.0;  ///< [rad]
  int count = 2;
};

/// Sweep over joints 2, 3, 4 (motor angles); joint 1 is held at 0.
struct GridSpec {
  std::array<AxisSpec, 3> axes;

  /// 13 x 9 x 9 = 1053 poses across the arm's range of motion.
  static GridSpec workspace();
  std::size_t size() const;
};

struct Dataset {
  GridSpec grid;
  std::vector<Eigen::Vector4d> q;    ///< [rad]
  std::vector<Eigen::Vector4d> tau;  ///< grav_load at q [N m]

  std::size_t size() const { return q.size(); }
  std::vector<double> torques(int joint) const;
};

/// Row-major Cartesian grid (joint 2 slowest) with grav_load torques.
Dataset generate_dataset(const RobotModel& model, const GridSpec& grid);

void write_dataset_csv(const Dataset& dataset, std::ostream& out);

struct GaussianMf {
  double center = 0.0;  ///< [rad]
  double width = 1.0;   ///< standard deviation [rad]
};

/// First-order Takagi-Sugeno fuzzy regressor for one joint torque (MISO).
/// One rule per combination of membership functions; rule r uses MF
/// (r / K^(D-1-i)) % K on input i. Consequent row r holds one coefficient per
/// input followed by the bias.
struct FuzzyNet {
  int output_joint = 0;             ///< 0-based joint index
  std::vector<int> inputs;          ///< 0-based joint indices fed to the net
  std::vector<std::vector<GaussianMf>> mfs;
  Eigen::MatrixXd consequents;
  double training_rmse = 0.0;

  std::size_t rule_count() const;

  /// Normalized firing strengths; throws OutOfCoverageError if every rule's
  /// strength underflows.
  Eigen::VectorXd firing(const Eigen::Vector4d& q) const;
};

class OutOfCoverageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct TrainConfig {
  int mfs_per_input = 3;
  int epochs = 50;
  double learn_rate = 0.01;
  std::vector<int> inputs = {1, 2, 3};
};

struct TrainResult {
  FuzzyNet net;
  std::vector<double> rmse_history;  ///< post-least-squares RMSE per epoch
  double wall_seconds = 0.0;
};

/// Hybrid learning: each epoch solves the consequents by least squares, then
/// moves MF centres and widths down the squared-error gradient. A premise step
/// is only kept if the re-solved fit is no worse, so the recorded RMSE never
/// increases.
TrainResult train(const Dataset& dataset, int joint, const TrainConfig& config);

/// Trains one net per joint concurrently; results are in `joints` order.
std::vector<TrainResult> train_joints(const Dataset& dataset,
                                      const std::vector<int>& joints,
                                      const TrainConfig& config);

double predict(const FuzzyNet& net, const Eigen::Vector4d& q);

double rmse(std::span<const double> predictions, std::span<const double> truth);

std::string serialize_net(const FuzzyNet& net);
FuzzyNet parse_net(std::string_view text);

}  // namespace gravcomp

#endif  // GRAVCOMP_APPROX_HPP_
