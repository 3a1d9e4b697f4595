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

#ifndef GRAVCOMP_MODEL_HPP_
#define GRAVCOMP_MODEL_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gravcomp {

/// Standard (distal) Denavit-Hartenberg parameters of one revolute link.
struct DhLink {
  double a = 0.0;             ///< length along the common normal [m]
  double alpha = 0.0;         ///< twist [rad]
  double d_offset = 0.0;      ///< offset along the joint z axis [m]
  double theta_offset = 0.0;  ///< constant joint-angle offset [rad]

  bool operator==(const DhLink&) const = default;
};

/// Inertial, drive and friction parameters of one link.
///
/// `com` and `inertia` are expressed in the DH frame of the link, whose origin
/// sits at the distal joint. A mass lumped at the far end of the link therefore
/// has com = (0, 0, 0); the middle of a link of length a has com = (-a/2, 0, 0).
struct LinkDynamics {
  double mass = 0.0;                                    ///< [kg]
  Eigen::Vector3d com = Eigen::Vector3d::Zero();        ///< [m]
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();    ///< about the COM [kg m^2]
  double motor_inertia = 0.0;                           ///< rotor [kg m^2]
  double gear_ratio = 1.0;
  double viscous = 0.0;                                 ///< [N m s/rad]
  double coulomb = 0.0;                                 ///< [N m]

  bool operator==(const LinkDynamics& other) const;
};

struct Link {
  DhLink dh;
  LinkDynamics dynamics;

  bool operator==(const Link& other) const {
    return dh == other.dh && dynamics == other.dynamics;
  }
};

/// Serial chain of revolute links plus the base-frame gravity vector.
///
/// Immutable once built; the constructor validates every invariant and throws
/// ConfigError naming the offending field.
class RobotModel {
 public:
  RobotModel(std::vector<Link> links, const Eigen::Vector3d& gravity);

  std::size_t dof() const noexcept { return links_.size(); }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Link& link(std::size_t i) const { return links_.at(i); }
  const Eigen::Vector3d& gravity() const noexcept { return gravity_; }

  /// Link lengths used by the closed-form controller (the DH `a` column).
  const Eigen::VectorXd& link_lengths() const noexcept { return link_lengths_; }

  RobotModel with_gravity(const Eigen::Vector3d& gravity) const;
  RobotModel without_friction() const;

  bool operator==(const RobotModel& other) const;

 private:
  std::vector<Link> links_;
  Eigen::Vector3d gravity_;
  Eigen::VectorXd link_lengths_;
};

inline constexpr double kStandardGravity = 9.8;

/// The 4-DoF upper-body exoskeleton arm.
RobotModel exoskeleton_default();

/// Parses a robot config document (INI-style, `[link.N]` sections).
RobotModel load_robot_config(std::string_view text);
RobotModel load_robot_file(const std::filesystem::path& path);

/// Writes a document that load_robot_config() reads back field-wise exactly.
std::string to_config_text(const RobotModel& model);

}  // namespace gravcomp

#endif  // GRAVCOMP_MODEL_HPP_
