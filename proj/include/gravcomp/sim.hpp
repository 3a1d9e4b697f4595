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

#ifndef GRAVCOMP_SIM_HPP_
#define GRAVCOMP_SIM_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/controller.hpp"
#include "gravcomp/errors.hpp"
#include "gravcomp/model.hpp"

namespace gravcomp {

enum class ControllerKind { kNone, kStatic, kMobile, kOracle };

std::string_view to_string(ControllerKind kind);
ControllerKind parse_controller(std::string_view name);

/// Constant external joint torque over [start, end).
struct Disturbance {
  double start = 0.0;  ///< [s]
  double end = 0.0;    ///< [s]
  int joint = 0;       ///< 0-based
  double torque = 0.0; ///< [N m]
};

/// Body pose in effect from `start` until the next change.
struct PoseChange {
  double start = 0.0;
  BodyPose pose;
};

struct PoseHold {
  Eigen::VectorXd q;
  double hold = 0.0;  ///< [s]
};

struct Scenario {
  double duration = 1.0;  ///< [s], ignored for pose schedules
  double dt = 1e-3;       ///< [s]
  Eigen::VectorXd q0;
  Eigen::VectorXd qd0;    ///< empty means at rest
  ControllerKind controller = ControllerKind::kOracle;
  bool clamp = true;
  Eigen::VectorXd torque_limits;  ///< empty means exoskeleton_torque_limits()
  std::vector<Disturbance> disturbances;
  std::vector<PoseChange> pose_profile;
  std::vector<PoseHold> pose_schedule;
  double ramp_time = 2.0;  ///< repositioning time between scheduled poses [s]
  int trace_stride = 1;    ///< record every n-th step

  /// Throws InputError describing the first violated constraint.
  void validate(std::size_t dof) const;
  BodyPose pose_at(double t) const;
  /// Length of the run: `duration`, or the schedule's holds plus ramps.
  double total_time() const;
};

struct TraceRow {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd tau_cmd;
  Eigen::VectorXd tau_ext;
};

struct SimTrace {
  double dt = 0.0;  ///< spacing of recorded rows [s]
  std::vector<TraceRow> rows;
};

/// Thrown when a joint speed exceeds kDivergenceSpeed; carries the trace up to
/// the failing step.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, SimTrace prefix)
      : NumericalError(what), prefix_(std::move(prefix)) {}
  const SimTrace& prefix() const noexcept { return prefix_; }

 private:
  SimTrace prefix_;
};

inline constexpr double kDivergenceSpeed = 50.0;  // rad/s

/// Fixed-step RK4 integration of the arm under the selected feedforward
/// controller plus disturbance torques. Controller output is held constant over
/// each step. When a pose profile is set, the plant's gravity is rotated by the
/// body pose and the mobile law sees the same pose.
SimTrace run_scenario(const RobotModel& model, const CompParams& params,
                      const AngleMap& map, const Scenario& scenario);

/// Holds each pose in turn. Between holds the arm is moved to the next pose
/// along a minimum-jerk path lasting `settings.ramp_time`, as if repositioned
/// by the wearer; tau_ext then records the torque the wearer supplied.
/// `settings` provides dt, controller, clamping and disturbances.
SimTrace run_pose_schedule(const RobotModel& model, const CompParams& params,
                           const AngleMap& map, const std::vector<PoseHold>& poses,
                           const Scenario& settings);

/// Dispatches to run_pose_schedule when the scenario has a schedule.
SimTrace simulate(const RobotModel& model, const CompParams& params,
                  const AngleMap& map, const Scenario& scenario);

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
  bool is_disturbance = false;
};

/// Disturbance windows (overlaps merged) and schedule ramps, in time order.
std::vector<TimeWindow> excluded_windows(const Scenario& scenario);

struct HoldSegment {
  double start = 0.0;
  double end = 0.0;
  Eigen::VectorXd drift;       ///< max |q(t) - q(start)| [rad]
  Eigen::VectorXd mean_speed;  ///< mean |qd| [rad/s]
  Eigen::VectorXd max_speed;   ///< max |qd| [rad/s]
};

struct StabilityReport {
  std::vector<HoldSegment> segments;
  Eigen::VectorXd max_drift;
  Eigen::VectorXd mean_speed;
  Eigen::VectorXd max_speed;
  /// Per disturbance window: delay after its end until every |qd| stays below
  /// kSettleSpeed for kSettleHold. Empty if that never happens.
  std::vector<std::optional<double>> settle_times;
};

inline constexpr double kSettleSpeed = 1e-3;  // rad/s
inline constexpr double kSettleHold = 1.0;    // s
inline constexpr double kSettleMargin = 1.0;  // s excluded after each window

StabilityReport stability_metrics(const SimTrace& trace, const Scenario& scenario);

void write_trace_csv(const SimTrace& trace, std::ostream& out);

Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

}  // namespace gravcomp

#endif  // GRAVCOMP_SIM_HPP_
