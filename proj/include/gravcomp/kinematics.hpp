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

#ifndef GRAVCOMP_KINEMATICS_HPP_
#define GRAVCOMP_KINEMATICS_HPP_

#include <vector>

#include <Eigen/Dense>
#include <Eigen/StdVector>

#include "gravcomp/model.hpp"

namespace gravcomp {

using Transform = Eigen::Matrix4d;

/// Base-to-link transforms, one per link (index i is the frame of link i).
struct FrameSet {
  std::vector<Transform, Eigen::aligned_allocator<Transform>> transforms;

  const Transform& end() const { return transforms.back(); }
};

/// Rot_z(q + theta_offset) * Trans_z(d) * Trans_x(a) * Rot_x(alpha).
Transform link_transform(const DhLink& link, double q);

FrameSet forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// World-frame centre of mass of every link.
std::vector<Eigen::Vector3d> com_positions(const RobotModel& model,
                                           const Eigen::VectorXd& q);

/// 6xN geometric Jacobian of the last link frame, linear rows on top.
Eigen::MatrixXd geometric_jacobian(const RobotModel& model,
                                   const Eigen::VectorXd& q);

/// Gravitational potential energy, V = -sum m_i g . p_i, so that dV/dq is
/// the static gravity load.
double potential_energy(const RobotModel& model, const Eigen::VectorXd& q);

// Throws DimensionError unless q has one entry per link.
void check_joint_vector(const RobotModel& model, const Eigen::VectorXd& q,
                        const char* name);

}  // namespace gravcomp

#endif  // GRAVCOMP_KINEMATICS_HPP_
