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

#ifndef GRAVCOMP_TESTS_TEST_SUPPORT_HPP_
#define GRAVCOMP_TESTS_TEST_SUPPORT_HPP_

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "gravcomp/model.hpp"

namespace gravcomp::testing {

inline constexpr double kPi = std::numbers::pi;

inline Eigen::VectorXd random_q(std::mt19937_64& rng, Eigen::Index n,
                                double span = kPi) {
  std::uniform_real_distribution<double> dist(-span, span);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = dist(rng);
  return q;
}

/// Planar rod pendulum turning about base z: length 1, mass `mass` with its
/// centre `lc` from the joint, rod inertia about the COM.
inline RobotModel pendulum(double mass = 1.0, double lc = 0.5, double motor = 0.0,
                           double gear = 1.0,
                           Eigen::Vector3d gravity = {0.0, -9.8, 0.0}) {
  Link link;
  link.dh.a = 1.0;
  link.dynamics.mass = mass;
  link.dynamics.com = {lc - 1.0, 0.0, 0.0};
  link.dynamics.inertia = Eigen::Vector3d(0.0, mass / 12.0, mass / 12.0).asDiagonal();
  link.dynamics.motor_inertia = motor;
  link.dynamics.gear_ratio = gear;
  return RobotModel({link}, gravity);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace gravcomp::testing

#endif  // GRAVCOMP_TESTS_TEST_SUPPORT_HPP_
