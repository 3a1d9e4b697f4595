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

#include "gravcomp/controller.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace gravcomp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<double, 2> kSigns = {-1.0, 1.0};
constexpr std::array<double, 4> kOffsets = {-kPi / 2, 0.0, kPi / 2, kPi};

}  // namespace

CompParams CompParams::from_model(const RobotModel& model) {
  if (model.dof() != 4) {
    throw DimensionError(fmt::format(
        "closed-form gravity law needs a 4-joint arm, model has {}", model.dof()));
  }
  CompParams params;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const auto& link = model.link(static_cast<std::size_t>(i));
    params.mass[i] = link.dynamics.mass;
    params.length[i] = model.link_lengths()[i];
    // com is in the distal frame; shift it back to the proximal joint.
    params.com_distance[i] = link.dh.a + link.dynamics.com.x();
  }
  params.g = model.gravity().norm();
  return params;
}

AngleMap AngleMap::identity(Eigen::Index n) {
  return {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)};
}

AngleMap AngleMap::inverse() const {
  // q = sign * (theta - offset), with sign^2 = 1.
  return {sign, -sign.cwiseProduct(offset)};
}

Eigen::VectorXd map_angles(const AngleMap& map, const Eigen::VectorXd& q_motor) {
  if (q_motor.size() != map.sign.size() || map.offset.size() != map.sign.size()) {
    throw DimensionError(fmt::format("angle map has {} joints, got {} angles",
                                     map.sign.size(), q_motor.size()));
  }
  return map.sign.cwiseProduct(q_motor) + map.offset;
}

TorqueVector static_gravity_torque(const CompParams& p, const Eigen::Vector4d& theta) {
  const auto& m = p.mass;
  const auto& l = p.length;
  const auto& d = p.com_distance;
  const auto& c = p.gains;
  const double m_all = m[0] + m[1] + m[2] + m[3];
  const double m_234 = m[1] + m[2] + m[3];
  const double m_34 = m[2] + m[3];
  const double t1 = theta[0], t2 = theta[1], t3 = theta[2], t4 = theta[3];

  TorqueVector tau(4);
  tau[0] = c[0] * p.g *
           (d[0] * m_all + l[1] * m_234 * std::sin(t2) + l[2] * m_34 * std::cos(t3) +
            l[3] * m[3] * std::cos(t3 + t4)) *
           std::sin(t1);
  tau[1] = c[1] * p.g *
           (d[1] * m_234 + l[2] * m_34 * std::cos(t3) + l[3] * m[3] * std::cos(t3 + t4)) *
           std::sin(t2);
  tau[2] = c[2] * p.g *
           (d[2] * m_34 * std::sin(t3) + l[3] * m[3] * std::sin(t3 + t4)) *
           std::cos(t2);
  tau[3] = c[3] * p.g * d[3] * m[3] * std::sin(t3 + t4) * std::cos(t2);
  return tau;
}

TorqueVector mobile_gravity_torque(const CompParams& p, const Eigen::Vector4d& theta,
                                   const BodyPose& pose) {
  const auto& m = p.mass;
  const auto& l = p.length;
  const auto& d = p.com_distance;
  const auto& c = p.gains;
  const double m_all = m[0] + m[1] + m[2] + m[3];
  const double m_234 = m[1] + m[2] + m[3];
  const double m_34 = m[2] + m[3];
  const double t1 = theta[0], t2 = theta[1], t3 = theta[2], t4 = theta[3];
  const double b = pose.beta, f = pose.phi;
  const double tilt = std::cos(f) * std::cos(b);

  TorqueVector tau(4);
  tau[0] = c[0] * p.g *
           (d[0] * m_all + l[1] * m_234 * std::sin(t2 + f) +
            l[2] * m_34 * std::cos(t3 + b) + l[3] * m[3] * std::cos(t3 + t4 + b)) *
           std::sin(t1) * tilt;
  tau[1] = c[1] * p.g *
           (d[1] * m_234 + l[2] * m_34 * std::cos(t3 + b) +
            l[3] * m[3] * std::cos(t3 + t4 + b)) *
           std::sin(t2 + f) * std::cos(t1) * tilt;
  tau[2] = c[2] * p.g *
           (d[2] * m_34 * std::sin(t3 + b) + l[3] * m[3] * std::sin(t3 + t4 + b)) *
           std::cos(t2 + f) * std::cos(t1) * tilt;
  tau[3] = c[3] * p.g * d[3] * m[3] * std::sin(t3 + t4 + b) * std::cos(t2 + f) *
           std::cos(t1) * tilt;
  return tau;
}

Calibration search_angle_map(
    const std::vector<Eigen::VectorXd>& probes,
    const std::vector<TorqueVector>& oracle,
    const std::function<TorqueVector(const Eigen::VectorXd&)>& equation) {
  if (probes.empty() || probes.size() != oracle.size()) {
    throw DimensionError("calibration needs one oracle torque per probe");
  }
  const auto n = probes.front().size();
  std::size_t candidates = 1;
  for (Eigen::Index i = 0; i < n; ++i) candidates *= 2 * kOffsets.size();

  // Candidate index digits, most significant first: all sign choices, then
  // all offset choices. Counting upward enumerates (sign, offset)
  // lexicographically.
  Calibration best{AngleMap::identity(n), INFINITY};
  AngleMap map = AngleMap::identity(n);
  for (std::size_t k = 0; k < candidates; ++k) {
    std::size_t code = k;
    for (Eigen::Index i = n; i-- > 0;) {
      map.offset[i] = kOffsets[code % kOffsets.size()];
      code /= kOffsets.size();
    }
    for (Eigen::Index i = n; i-- > 0;) {
      map.sign[i] = kSigns[code % kSigns.size()];
      code /= kSigns.size();
    }
    double residual = 0.0;
    for (std::size_t p = 0; p < probes.size() && residual < best.residual; ++p) {
      residual += (equation(map_angles(map, probes[p])) - oracle[p]).squaredNorm();
    }
    // Rounding-level differences count as ties.
    const bool first = !std::isfinite(best.residual);
    if (first ? residual < best.residual
              : residual < best.residual - (1e-9 * best.residual + 1e-20)) {
      best = {map, residual};
    }
  }
  if (!(best.residual < kCalibrationTolerance)) {
    throw CalibrationError(
        fmt::format("no angle map reproduces the oracle: best residual {:.3e} "
                    "(sign [{}], offset [{}])",
                    best.residual, fmt::join(best.map.sign, ", "),
                    fmt::join(best.map.offset, ", ")),
        best.residual);
  }
  return best;
}

std::vector<Eigen::VectorXd> calibration_probes() {
  constexpr int kCount = 5;
  // Deliberately asymmetric spans so distinct maps cannot tie.
  const std::array<std::array<double, 2>, 3> spans = {
      {{0.3, 2.9}, {-1.4, 1.2}, {0.2, 2.0}}};
  std::vector<Eigen::VectorXd> probes;
  for (int a = 0; a < kCount; ++a) {
    for (int b = 0; b < kCount; ++b) {
      for (int c = 0; c < kCount; ++c) {
        const std::array<int, 3> idx = {a, b, c};
        Eigen::VectorXd q = Eigen::VectorXd::Zero(4);
        for (std::size_t j = 0; j < 3; ++j) {
          q[static_cast<Eigen::Index>(j) + 1] =
              spans[j][0] + (spans[j][1] - spans[j][0]) * idx[j] / (kCount - 1);
        }
        probes.push_back(q);
      }
    }
  }
  return probes;
}

Calibration calibrate_angle_map(const RobotModel& model, const CompParams& params) {
  if (model.dof() != 4) {
    throw DimensionError("angle-map calibration needs a 4-joint arm");
  }
  const auto probes = calibration_probes();
  std::vector<TorqueVector> oracle;
  oracle.reserve(probes.size());
  for (const auto& q : probes) oracle.push_back(grav_load(model, q));
  return search_angle_map(probes, oracle, [&params](const Eigen::VectorXd& theta) {
    return static_gravity_torque(params, theta.head<4>());
  });
}

TorqueVector clamp_torque(const TorqueVector& tau, const Eigen::VectorXd& limits) {
  if (tau.size() != limits.size()) {
    throw DimensionError(fmt::format("{} torques but {} limits", tau.size(),
                                     limits.size()));
  }
  if ((limits.array() <= 0.0).any()) {
    throw InputError("torque limits must be positive");
  }
  return tau.cwiseMax(-limits).cwiseMin(limits);
}

Eigen::Vector4d exoskeleton_torque_limits() { return {9.0, 18.0, 9.0, 9.0}; }

}  // namespace gravcomp
