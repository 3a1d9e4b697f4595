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

#include "gravcomp/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "gravcomp/errors.hpp"
#include "gravcomp/text_format.hpp"

namespace gravcomp {
namespace {

constexpr double kPi = std::numbers::pi;

void check_finite(double value, const std::string& field) {
  if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
}

void validate_link(const Link& link, std::size_t index) {
  const auto field = [index](const char* key) {
    return fmt::format("link.{}.{}", index + 1, key);
  };
  const auto& dh = link.dh;
  check_finite(dh.a, field("a"));
  check_finite(dh.alpha, field("alpha"));
  check_finite(dh.d_offset, field("d"));
  check_finite(dh.theta_offset, field("offset"));
  if (dh.theta_offset < -kPi || dh.theta_offset > kPi) {
    throw ConfigError(field("offset"), "must lie in [-pi, pi]");
  }

  const auto& dyn = link.dynamics;
  check_finite(dyn.mass, field("mass"));
  if (dyn.mass < 0.0) throw ConfigError(field("mass"), "must be >= 0");
  if (!dyn.com.allFinite()) throw ConfigError(field("com"), "must be finite");
  if (!dyn.inertia.allFinite()) {
    throw ConfigError(field("inertia"), "must be finite");
  }
  const double scale = std::max(1.0, dyn.inertia.cwiseAbs().maxCoeff());
  if ((dyn.inertia - dyn.inertia.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    throw ConfigError(field("inertia"), "must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(dyn.inertia,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw ConfigError(field("inertia"), "must be positive semi-definite");
  }
  check_finite(dyn.motor_inertia, field("motor_inertia"));
  if (dyn.motor_inertia < 0.0) {
    throw ConfigError(field("motor_inertia"), "must be >= 0");
  }
  check_finite(dyn.gear_ratio, field("gear_ratio"));
  if (dyn.gear_ratio <= 0.0) throw ConfigError(field("gear_ratio"), "must be > 0");
  check_finite(dyn.viscous, field("viscous"));
  if (dyn.viscous < 0.0) throw ConfigError(field("viscous"), "must be >= 0");
  check_finite(dyn.coulomb, field("coulomb"));
  if (dyn.coulomb < 0.0) throw ConfigError(field("coulomb"), "must be >= 0");
}

Eigen::Matrix3d inertia_from_list(const std::vector<double>& v) {
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
  if (v.size() == 3) {
    inertia.diagonal() << v[0], v[1], v[2];
  } else if (v.size() == 6) {
    // ixx, iyy, izz, ixy, iyz, ixz
    inertia << v[0], v[3], v[5],
               v[3], v[1], v[4],
               v[5], v[4], v[2];
  } else {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) inertia(r, c) = v[3 * r + c];
  }
  return inertia;
}

Link parse_link(text::Section& s) {
  Link link;
  link.dh.a = s.number("a", 0.0);
  link.dh.alpha = s.number("alpha", 0.0);
  link.dh.d_offset = s.number("d", 0.0);
  link.dh.theta_offset = s.number("offset", 0.0);

  auto& dyn = link.dynamics;
  dyn.mass = s.number("mass", 0.0);
  const auto com = s.list_or("com", {0.0, 0.0, 0.0}, 3, 3);
  dyn.com = Eigen::Vector3d(com[0], com[1], com[2]);
  const auto inertia = s.list_or("inertia", {0.0, 0.0, 0.0}, 3, 9);
  if (inertia.size() != 3 && inertia.size() != 6 && inertia.size() != 9) {
    throw ConfigError(s.field("inertia"), "expected 3, 6 or 9 values");
  }
  dyn.inertia = inertia_from_list(inertia);
  dyn.motor_inertia = s.number("motor_inertia", 0.0);
  dyn.gear_ratio = s.number("gear_ratio", 1.0);
  dyn.viscous = s.number("viscous", 0.0);
  dyn.coulomb = s.number("coulomb", 0.0);
  s.reject_unknown();
  return link;
}

// Thin rod along the link x axis, about its centre.
Eigen::Matrix3d rod_inertia(double mass, double length) {
  const double i = mass * length * length / 12.0;
  return Eigen::Vector3d(0.0, i, i).asDiagonal();
}

}  // namespace

bool LinkDynamics::operator==(const LinkDynamics& other) const {
  return mass == other.mass && com == other.com && inertia == other.inertia &&
         motor_inertia == other.motor_inertia &&
         gear_ratio == other.gear_ratio && viscous == other.viscous &&
         coulomb == other.coulomb;
}

RobotModel::RobotModel(std::vector<Link> links, const Eigen::Vector3d& gravity)
    : links_(std::move(links)), gravity_(gravity) {
  if (links_.empty()) throw ConfigError("link", "at least one link is required");
  if (!gravity_.allFinite()) throw ConfigError("gravity", "must be finite");
  for (std::size_t i = 0; i < links_.size(); ++i) validate_link(links_[i], i);
  link_lengths_.resize(static_cast<Eigen::Index>(links_.size()));
  for (std::size_t i = 0; i < links_.size(); ++i) {
    link_lengths_[static_cast<Eigen::Index>(i)] = links_[i].dh.a;
  }
}

RobotModel RobotModel::with_gravity(const Eigen::Vector3d& gravity) const {
  return RobotModel(links_, gravity);
}

RobotModel RobotModel::without_friction() const {
  auto links = links_;
  for (auto& link : links) {
    link.dynamics.viscous = 0.0;
    link.dynamics.coulomb = 0.0;
  }
  return RobotModel(std::move(links), gravity_);
}

bool RobotModel::operator==(const RobotModel& other) const {
  return links_ == other.links_ && gravity_ == other.gravity_;
}

RobotModel exoskeleton_default() {
  struct Row {
    DhLink dh;
    double mass;
    double motor_inertia;
    double gear_ratio;
    double viscous;
    double coulomb;
  };
  // Joints 1, 3, 4: 6:1 planetary drives; joint 2: 9:1.
  const Row rows[] = {
      {{0.05, -kPi / 2, 0.0, 0.0}, 0.6, 2.4e-5, 6.0, 0.05, 0.01},
      {{0.13, kPi / 2, 0.0, -kPi / 2}, 0.8, 6.1e-5, 9.0, 0.08, 0.02},
      {{0.3, 0.0, 0.0, 0.0}, 0.4, 2.4e-5, 6.0, 0.05, 0.01},
      {{0.3, 0.0, 0.0, 0.0}, 0.3, 2.4e-5, 6.0, 0.05, 0.01},
  };

  std::vector<Link> links;
  for (const auto& row : rows) {
    Link link;
    link.dh = row.dh;
    link.dynamics.mass = row.mass;
    // Each link's mass is lumped at its distal joint (motor + bracket), which
    // puts the centre of gravity at the DH frame origin.
    link.dynamics.com = Eigen::Vector3d::Zero();
    link.dynamics.inertia = rod_inertia(row.mass, row.dh.a);
    link.dynamics.motor_inertia = row.motor_inertia;
    link.dynamics.gear_ratio = row.gear_ratio;
    link.dynamics.viscous = row.viscous;
    link.dynamics.coulomb = row.coulomb;
    links.push_back(link);
  }
  return RobotModel(std::move(links), Eigen::Vector3d(0.0, 0.0, -kStandardGravity));
}

RobotModel load_robot_config(std::string_view text) {
  const auto tree = text::parse_ini(text);
  text::Section top(tree, "");
  const auto g = top.list_or("gravity", {0.0, 0.0, -kStandardGravity}, 3, 3);

  std::map<std::size_t, Link> by_index;
  for (const auto& [name, child] : tree) {
    if (child.empty()) continue;  // top-level key
    if (name.rfind("link.", 0) != 0) {
      throw ConfigError(name, "unknown section");
    }
    const auto index_text = name.substr(5);
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(
        index_text.data(), index_text.data() + index_text.size(), index);
    if (ec != std::errc() || ptr != index_text.data() + index_text.size() ||
        index == 0) {
      throw ConfigError(name, "section must be [link.N] with N >= 1");
    }
    text::Section section(child, name);
    by_index[index] = parse_link(section);
  }
  top.reject_unknown();

  std::vector<Link> links;
  for (const auto& [index, link] : by_index) {
    if (index != links.size() + 1) {
      throw ConfigError(fmt::format("link.{}", links.size() + 1),
                        "missing section (links must be numbered 1..N)");
    }
    links.push_back(link);
  }
  return RobotModel(std::move(links), Eigen::Vector3d(g[0], g[1], g[2]));
}

RobotModel load_robot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open robot file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_robot_config(buffer.str());
}

std::string to_config_text(const RobotModel& model) {
  using text::format_double;
  using text::format_list;
  const auto& g = model.gravity();
  std::string out;
  out += "# Robot description: standard DH links, SI units, angles in rad.\n";
  out += "gravity = " + format_list({g.x(), g.y(), g.z()}) + "\n";
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& [dh, dyn] = model.link(i);
    const auto& I = dyn.inertia;
    out += fmt::format("\n[link.{}]\n", i + 1);
    out += "a = " + format_double(dh.a) + "\n";
    out += "alpha = " + format_double(dh.alpha) + "\n";
    out += "d = " + format_double(dh.d_offset) + "\n";
    out += "offset = " + format_double(dh.theta_offset) + "\n";
    out += "mass = " + format_double(dyn.mass) + "\n";
    out += "com = " + format_list({dyn.com.x(), dyn.com.y(), dyn.com.z()}) + "\n";
    out += "inertia = " + format_list({I(0, 0), I(1, 1), I(2, 2), I(0, 1),
                                       I(1, 2), I(0, 2)}) +
           "\n";
    out += "motor_inertia = " + format_double(dyn.motor_inertia) + "\n";
    out += "gear_ratio = " + format_double(dyn.gear_ratio) + "\n";
    out += "viscous = " + format_double(dyn.viscous) + "\n";
    out += "coulomb = " + format_double(dyn.coulomb) + "\n";
  }
  return out;
}

}  // namespace gravcomp
