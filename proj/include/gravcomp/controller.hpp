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

#ifndef GRAVCOMP_CONTROLLER_HPP_
#define GRAVCOMP_CONTROLLER_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gravcomp/dynamics.hpp"
#include "gravcomp/errors.hpp"
#include "gravcomp/model.hpp"

namespace gravcomp {

/// Constants of the closed-form gravity law for a 4-joint arm. Index n-1
/// holds the value for joint n.
struct CompParams {
  Eigen::Vector4d gains = Eigen::Vector4d::Ones();
  Eigen::Vector4d mass = Eigen::Vector4d::Zero();          ///< [kg]
  Eigen::Vector4d length = Eigen::Vector4d::Zero();        ///< [m]
  Eigen::Vector4d com_distance = Eigen::Vector4d::Zero();  ///< from joint n [m]
  double g = kStandardGravity;

  /// Derives masses, link lengths and centre-of-gravity distances from the
  /// model so the controller and the oracle never disagree on constants.
  static CompParams from_model(const RobotModel& model);
};

/// Trunk orientation from the shoulder gyroscope.
struct BodyPose {
  double beta = 0.0;  ///< bowing (pitch) [rad]
  double phi = 0.0;   ///< sideways tilt [rad]

  bool operator==(const BodyPose&) const = default;
};

/// Per-joint affine map from motor (DH) angles to the angles the closed-form
/// equations are written in: theta_eq = sign * q + offset.
struct AngleMap {
  Eigen::VectorXd sign;
  Eigen::VectorXd offset;

  static AngleMap identity(Eigen::Index n);
  AngleMap inverse() const;
  bool operator==(const AngleMap& other) const {
    return sign == other.sign && offset == other.offset;
  }
};

Eigen::VectorXd map_angles(const AngleMap& map, const Eigen::VectorXd& q_motor);

/// Stationary-wearer law. `theta` is in equation angles.
TorqueVector static_gravity_torque(const CompParams& params,
                                   const Eigen::Vector4d& theta);

/// Gyro-stabilized law for a moving wearer, transcribed as printed. It does
/// not reduce to the static law at beta = phi = 0 unless theta_1 = 0: joints
/// 2-4 carry an extra cos(theta_1) factor.
TorqueVector mobile_gravity_torque(const CompParams& params,
                                   const Eigen::Vector4d& theta,
                                   const BodyPose& pose);

class CalibrationError : public NumericalError {
 public:
  CalibrationError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

struct Calibration {
  AngleMap map;
  double residual = 0.0;  ///< sum of squared torque errors over the probes [N^2 m^2]
};

inline constexpr double kCalibrationTolerance = 1e-6;

/// Exhaustive search over sign in {-1, +1} and offset in {-pi/2, 0, pi/2, pi}
/// per joint. `equation` maps equation angles to torques; `oracle[k]` is the
/// reference torque at `probes[k]` (motor angles). Ties go to the
/// lexicographically smallest (sign, offset). Throws CalibrationError when the
/// best residual is not below kCalibrationTolerance.
Calibration search_angle_map(
    const std::vector<Eigen::VectorXd>& probes,
    const std::vector<TorqueVector>& oracle,
    const std::function<TorqueVector(const Eigen::VectorXd&)>& equation);

/// 5x5x5 probe grid over joints 2-4 (joint 1 held at 0) for a 4-joint arm.
std::vector<Eigen::VectorXd> calibration_probes();

/// Finds the map under which static_gravity_torque reproduces grav_load.
Calibration calibrate_angle_map(const RobotModel& model, const CompParams& params);

TorqueVector clamp_torque(const TorqueVector& tau, const Eigen::VectorXd& limits);

/// Peak motor torques: 9 N m on joints 1, 3, 4 and 18 N m on joint 2.
Eigen::Vector4d exoskeleton_torque_limits();

}  // namespace gravcomp

#endif  // GRAVCOMP_CONTROLLER_HPP_
