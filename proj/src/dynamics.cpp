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

#include "gravcomp/dynamics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "gravcomp/errors.hpp"
#include "gravcomp/kinematics.hpp"

namespace gravcomp {
namespace {

// World-frame geometry of the chain at one configuration. Shared by every
// recursion pass that needs the same q.
class ChainGeometry {
 public:
  ChainGeometry(const RobotModel& model, const Eigen::VectorXd& q)
      : model_(&model) {
    const std::size_t n = model.dof();
    axis_.resize(n);
    origin_.resize(n + 1);
    com_.resize(n);
    inertia_.resize(n);
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    origin_[0] = pos;
    for (std::size_t i = 0; i < n; ++i) {
      axis_[i] = rot.col(2);
      const Transform a =
          link_transform(model.link(i).dh, q[static_cast<Eigen::Index>(i)]);
      pos = pos + rot * a.topRightCorner<3, 1>();
      rot = rot * a.topLeftCorner<3, 3>();
      origin_[i + 1] = pos;
      const auto& dyn = model.link(i).dynamics;
      com_[i] = pos + rot * dyn.com;
      inertia_[i] = rot * dyn.inertia * rot.transpose();
    }
  }

  // One Newton-Euler sweep. qd/qdd may be null (treated as zero).
  TorqueVector pass(const Eigen::VectorXd* qd, const Eigen::VectorXd* qdd,
                    const Eigen::Vector3d& gravity, const Wrench& tip) const {
    const std::size_t n = model_->dof();
    std::vector<Eigen::Vector3d> force(n), moment(n);
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
    // Accelerating the base against gravity is equivalent to gravity itself.
    Eigen::Vector3d acc = -gravity;
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double rate = qd ? (*qd)[k] : 0.0;
      const double accel = qdd ? (*qdd)[k] : 0.0;
      const Eigen::Vector3d& z = axis_[i];
      alpha += z * accel + omega.cross(z * rate);
      omega += z * rate;

      const Eigen::Vector3d to_com = com_[i] - origin_[i];
      const Eigen::Vector3d to_next = origin_[i + 1] - origin_[i];
      const Eigen::Vector3d acc_com =
          acc + alpha.cross(to_com) + omega.cross(omega.cross(to_com));
      acc += alpha.cross(to_next) + omega.cross(omega.cross(to_next));

      const auto& dyn = model_->link(i).dynamics;
      force[i] = dyn.mass * acc_com;
      moment[i] = inertia_[i] * alpha + omega.cross(inertia_[i] * omega);
    }

    TorqueVector tau(static_cast<Eigen::Index>(n));
    Eigen::Vector3d f = tip.force;
    Eigen::Vector3d m = tip.moment;
    for (std::size_t j = n; j-- > 0;) {
      // f, m: what link j+1 (or the environment) takes from link j, about
      // origin j+1. Shift to origin j and add link j's own inertial load.
      m += (origin_[j + 1] - origin_[j]).cross(f) +
           (com_[j] - origin_[j]).cross(force[j]) + moment[j];
      f += force[j];
      const auto& dyn = model_->link(j).dynamics;
      const auto k = static_cast<Eigen::Index>(j);
      const double accel = qdd ? (*qdd)[k] : 0.0;
      tau[k] = axis_[j].dot(m) +
               dyn.gear_ratio * dyn.gear_ratio * dyn.motor_inertia * accel;
    }
    return tau;
  }

  Eigen::MatrixXd mass_matrix() const {
    const auto n = static_cast<Eigen::Index>(model_->dof());
    Eigen::MatrixXd mass(n, n);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      unit[j] = 1.0;
      mass.col(j) = pass(nullptr, &unit, Eigen::Vector3d::Zero(), {});
      unit[j] = 0.0;
    }
    return mass;
  }

 private:
  const RobotModel* model_;
  std::vector<Eigen::Vector3d> axis_;
  std::vector<Eigen::Vector3d> origin_;
  std::vector<Eigen::Vector3d> com_;
  std::vector<Eigen::Matrix3d> inertia_;
};

void check_state(const RobotModel& model, const JointState& state) {
  check_joint_vector(model, state.q, "q");
  check_joint_vector(model, state.qd, "qd");
  check_joint_vector(model, state.qdd, "qdd");
}

}  // namespace

TorqueVector rne(const RobotModel& model, const JointState& state,
                 const Eigen::Vector3d& gravity, const Wrench& tip_wrench) {
  check_state(model, state);
  if (!gravity.allFinite()) throw InputError("gravity must be finite");
  return ChainGeometry(model, state.q)
      .pass(&state.qd, &state.qdd, gravity, tip_wrench);
}

TorqueVector grav_load(const RobotModel& model, const Eigen::VectorXd& q,
                       const Eigen::Vector3d& gravity) {
  check_joint_vector(model, q, "q");
  return ChainGeometry(model, q).pass(nullptr, nullptr, gravity, {});
}

TorqueVector grav_load(const RobotModel& model, const Eigen::VectorXd& q) {
  return grav_load(model, q, model.gravity());
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
  check_joint_vector(model, q, "q");
  return ChainGeometry(model, q).mass_matrix();
}

TorqueVector velocity_terms(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qd) {
  check_joint_vector(model, q, "q");
  check_joint_vector(model, qd, "qd");
  return ChainGeometry(model, q).pass(&qd, nullptr, Eigen::Vector3d::Zero(), {});
}

TorqueVector friction_torque(const RobotModel& model, const Eigen::VectorXd& qd) {
  check_joint_vector(model, qd, "qd");
  TorqueVector tau(qd.size());
  for (Eigen::Index i = 0; i < qd.size(); ++i) {
    const auto& dyn = model.link(static_cast<std::size_t>(i)).dynamics;
    tau[i] = dyn.viscous * qd[i] +
             dyn.coulomb * std::tanh(qd[i] / kCoulombSmoothing);
  }
  return tau;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const TorqueVector& tau_applied) {
  check_joint_vector(model, q, "q");
  check_joint_vector(model, qd, "qd");
  check_joint_vector(model, tau_applied, "tau");
  const ChainGeometry geometry(model, q);
  const Eigen::LLT<Eigen::MatrixXd> llt(geometry.mass_matrix());
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError(
        "mass matrix is not positive definite; check link masses and motor "
        "inertias");
  }
  const TorqueVector bias =
      geometry.pass(&qd, nullptr, model.gravity(), {}) + friction_torque(model, qd);
  return llt.solve(tau_applied - bias);
}

Eigen::Vector3d rotate_gravity(const Eigen::Vector3d& gravity, double beta,
                               double phi) {
  const Eigen::Matrix3d pitch =
      Eigen::AngleAxisd(beta, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d roll =
      Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()).toRotationMatrix();
  return pitch.transpose() * roll.transpose() * gravity;
}

Eigen::Vector3d rotated_gravity(double beta, double phi) {
  return rotate_gravity(Eigen::Vector3d(0.0, 0.0, -kStandardGravity), beta, phi);
}

double kinetic_energy(const RobotModel& model, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& qd) {
  check_joint_vector(model, qd, "qd");
  return 0.5 * qd.dot(mass_matrix(model, q) * qd);
}

}  // namespace gravcomp
