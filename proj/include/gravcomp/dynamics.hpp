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

#ifndef GRAVCOMP_DYNAMICS_HPP_
#define GRAVCOMP_DYNAMICS_HPP_

#include <Eigen/Dense>

#include "gravcomp/model.hpp"

namespace gravcomp {

using TorqueVector = Eigen::VectorXd;

struct JointState {
  Eigen::VectorXd q;    ///< [rad]
  Eigen::VectorXd qd;   ///< [rad/s]
  Eigen::VectorXd qdd;  ///< [rad/s^2]

  static JointState at_rest(const Eigen::VectorXd& q) {
    return {q, Eigen::VectorXd::Zero(q.size()), Eigen::VectorXd::Zero(q.size())};
  }
};

/// Force/moment the last link exerts on its environment, base frame, taken
/// about the origin of the last link frame.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
};

/// Viscous + Coulomb friction, Coulomb part smoothed as tanh(qd / eps).
inline constexpr double kCoulombSmoothing = 1e-3;  // rad/s

/// Recursive Newton-Euler inverse dynamics:
///   tau = M(q) qdd + C(q, qd) + G(q) + J(q)^T W
/// Reflected rotor inertia gear^2 * J_m adds to each joint's own term. Friction
/// is not included.
TorqueVector rne(const RobotModel& model, const JointState& state,
                 const Eigen::Vector3d& gravity, const Wrench& tip_wrench = {});

/// Static gravity load G(q).
TorqueVector grav_load(const RobotModel& model, const Eigen::VectorXd& q,
                       const Eigen::Vector3d& gravity);
TorqueVector grav_load(const RobotModel& model, const Eigen::VectorXd& q);

/// Joint-space inertia matrix, one unit-acceleration RNE pass per column.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q);

/// Centrifugal and Coriolis torques C(q, qd).
TorqueVector velocity_terms(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qd);

TorqueVector friction_torque(const RobotModel& model, const Eigen::VectorXd& qd);

/// qdd = M^-1 (tau - C - G - F), gravity taken from the model.
/// Throws SingularMatrixError when M is not positive definite.
Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const TorqueVector& tau_applied);

/// Base-frame gravity for a trunk bowed forward by `beta` (about base y) and
/// tilted sideways by `phi` (about base x).
Eigen::Vector3d rotated_gravity(double beta, double phi);

/// Same rotation applied to an arbitrary base gravity vector.
Eigen::Vector3d rotate_gravity(const Eigen::Vector3d& gravity, double beta,
                               double phi);

double kinetic_energy(const RobotModel& model, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& qd);

}  // namespace gravcomp

#endif  // GRAVCOMP_DYNAMICS_HPP_
