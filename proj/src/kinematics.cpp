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

#include "gravcomp/kinematics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gravcomp/errors.hpp"

namespace gravcomp {

void check_joint_vector(const RobotModel& model, const Eigen::VectorXd& q,
                        const char* name) {
  if (static_cast<std::size_t>(q.size()) != model.dof()) {
    throw DimensionError(fmt::format("{} has {} entries, robot has {} joints",
                                     name, q.size(), model.dof()));
  }
}

Transform link_transform(const DhLink& link, double q) {
  const double theta = q + link.theta_offset;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(link.alpha);
  const double sa = std::sin(link.alpha);
  Transform t;
  t << ct, -st * ca,  st * sa, link.a * ct,
       st,  ct * ca, -ct * sa, link.a * st,
      0.0,       sa,       ca, link.d_offset,
      0.0,      0.0,      0.0, 1.0;
  return t;
}

FrameSet forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_joint_vector(model, q, "q");
  FrameSet frames;
  frames.transforms.reserve(model.dof());
  Transform t = Transform::Identity();
  for (std::size_t i = 0; i < model.dof(); ++i) {
    t = t * link_transform(model.link(i).dh, q[static_cast<Eigen::Index>(i)]);
    frames.transforms.push_back(t);
  }
  return frames;
}

std::vector<Eigen::Vector3d> com_positions(const RobotModel& model,
                                           const Eigen::VectorXd& q) {
  const auto frames = forward_kinematics(model, q);
  std::vector<Eigen::Vector3d> out;
  out.reserve(model.dof());
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& t = frames.transforms[i];
    out.push_back(t.topLeftCorner<3, 3>() * model.link(i).dynamics.com +
                  t.topRightCorner<3, 1>());
  }
  return out;
}

Eigen::MatrixXd geometric_jacobian(const RobotModel& model,
                                   const Eigen::VectorXd& q) {
  const auto frames = forward_kinematics(model, q);
  const auto n = static_cast<Eigen::Index>(model.dof());
  const Eigen::Vector3d p_end = frames.end().topRightCorner<3, 1>();
  Eigen::MatrixXd jac(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Joint i turns about the z axis of the preceding frame.
    Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    if (i > 0) {
      const auto& prev = frames.transforms[static_cast<std::size_t>(i - 1)];
      z = prev.block<3, 1>(0, 2);
      p = prev.topRightCorner<3, 1>();
    }
    jac.block<3, 1>(0, i) = z.cross(p_end - p);
    jac.block<3, 1>(3, i) = z;
  }
  return jac;
}

double potential_energy(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto coms = com_positions(model, q);
  double v = 0.0;
  for (std::size_t i = 0; i < model.dof(); ++i) {
    v -= model.link(i).dynamics.mass * model.gravity().dot(coms[i]);
  }
  return v;
}

}  // namespace gravcomp
