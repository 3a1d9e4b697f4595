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

#include "gravcomp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "gravcomp/dynamics.hpp"
#include "gravcomp/text_format.hpp"

namespace gravcomp {
namespace {

long step_count(double span, double dt) {
  return std::lround(span / dt);
}

// Minimum-jerk blend s(u) = 10u^3 - 15u^4 + 6u^5 and its derivatives.
struct Blend {
  double s, ds, dds;
};

Blend min_jerk(double u) {
  const double u2 = u * u, u3 = u2 * u;
  return {u3 * (10.0 - 15.0 * u + 6.0 * u2), u2 * (30.0 - 60.0 * u + 30.0 * u2),
          u * (60.0 - 180.0 * u + 120.0 * u2)};
}

class Simulator {
 public:
  Simulator(const RobotModel& model, const CompParams& params, const AngleMap& map,
            const Scenario& scenario)
      : model_(model), params_(params), map_(map), scenario_(scenario) {
    limits_ = scenario.torque_limits.size() ? scenario.torque_limits
                                            : Eigen::VectorXd(exoskeleton_torque_limits());
    trace_.dt = scenario.dt * scenario.trace_stride;
  }

  void start(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    q_ = q;
    qd_ = qd;
    step_ = 0;
  }

  // Free motion under the controller for `steps` steps.
  void hold(long steps) {
    const auto n = q_.size();
    for (long k = 0; k < steps; ++k) {
      const double t = time();
      const RobotModel& plant = plant_at(t);
      const Eigen::VectorXd tau_cmd = command(plant, q_, t);
      const Eigen::VectorXd tau_ext = disturbance(t, n);
      record(t, tau_cmd, tau_ext);
      integrate(plant, tau_cmd + tau_ext);
      ++step_;
      if (!qd_.allFinite() || qd_.cwiseAbs().maxCoeff() > kDivergenceSpeed) {
        throw DivergenceError(
            fmt::format("simulation diverged at t = {:.3f} s: joint speeds [{}] "
                        "exceed {} rad/s",
                        time(), fmt::join(qd_, ", "), kDivergenceSpeed),
            std::move(trace_));
      }
    }
  }

  // Prescribed minimum-jerk move to `target`; the controller still runs and
  // the wearer supplies whatever else the motion needs.
  void ramp(const Eigen::VectorXd& target, long steps) {
    const Eigen::VectorXd from = q_;
    const Eigen::VectorXd delta = target - from;
    const double span = static_cast<double>(steps) * scenario_.dt;
    for (long k = 0; k < steps; ++k) {
      const double t = time();
      const Blend b = min_jerk(static_cast<double>(k) / static_cast<double>(steps));
      JointState state{from + b.s * delta, delta * (b.ds / span),
                       delta * (b.dds / (span * span))};
      q_ = state.q;
      qd_ = state.qd;
      const RobotModel& plant = plant_at(t);
      const Eigen::VectorXd tau_cmd = command(plant, q_, t);
      const Eigen::VectorXd needed =
          rne(plant, state, plant.gravity()) + friction_torque(plant, qd_);
      record(t, tau_cmd, needed - tau_cmd);
      ++step_;
    }
    q_ = target;
    qd_.setZero();
  }

  SimTrace finish() {
    const double t = time();
    const RobotModel& plant = plant_at(t);
    const Eigen::VectorXd tau_cmd = command(plant, q_, t);
    force_record(t, tau_cmd, disturbance(t, q_.size()));
    return std::move(trace_);
  }

 private:
  double time() const { return static_cast<double>(step_) * scenario_.dt; }

  const RobotModel& plant_at(double t) {
    const BodyPose pose = scenario_.pose_at(t);
    auto it = plants_.find({pose.beta, pose.phi});
    if (it == plants_.end()) {
      const auto g = rotate_gravity(model_.gravity(), pose.beta, pose.phi);
      it = plants_.emplace(std::pair{pose.beta, pose.phi}, model_.with_gravity(g)).first;
    }
    return it->second;
  }

  Eigen::VectorXd command(const RobotModel& plant, const Eigen::VectorXd& q,
                          double t) const {
    Eigen::VectorXd tau;
    switch (scenario_.controller) {
      case ControllerKind::kNone:
        return Eigen::VectorXd::Zero(q.size());
      case ControllerKind::kOracle:
        tau = grav_load(plant, q);
        break;
      case ControllerKind::kStatic:
        tau = static_gravity_torque(params_, map_angles(map_, q).head<4>());
        break;
      case ControllerKind::kMobile:
        tau = mobile_gravity_torque(params_, map_angles(map_, q).head<4>(),
                                    scenario_.pose_at(t));
        break;
    }
    return scenario_.clamp ? clamp_torque(tau, limits_) : tau;
  }

  Eigen::VectorXd disturbance(double t, Eigen::Index n) const {
    Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
    for (const auto& d : scenario_.disturbances) {
      if (t >= d.start - 1e-9 * scenario_.dt && t < d.end - 1e-9 * scenario_.dt) {
        tau[d.joint] += d.torque;
      }
    }
    return tau;
  }

  void integrate(const RobotModel& plant, const Eigen::VectorXd& tau) {
    const double h = scenario_.dt;
    const Eigen::VectorXd& q = q_;
    const Eigen::VectorXd& v = qd_;
    const Eigen::VectorXd a1 = forward_dynamics(plant, q, v, tau);
    const Eigen::VectorXd v2 = v + 0.5 * h * a1;
    const Eigen::VectorXd a2 = forward_dynamics(plant, q + 0.5 * h * v, v2, tau);
    const Eigen::VectorXd v3 = v + 0.5 * h * a2;
    const Eigen::VectorXd a3 = forward_dynamics(plant, q + 0.5 * h * v2, v3, tau);
    const Eigen::VectorXd v4 = v + h * a3;
    const Eigen::VectorXd a4 = forward_dynamics(plant, q + h * v3, v4, tau);
    q_ = q + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
    qd_ = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }

  void record(double t, const Eigen::VectorXd& tau_cmd, const Eigen::VectorXd& tau_ext) {
    if (step_ % scenario_.trace_stride == 0) force_record(t, tau_cmd, tau_ext);
  }

  void force_record(double t, const Eigen::VectorXd& tau_cmd,
                    const Eigen::VectorXd& tau_ext) {
    trace_.rows.push_back({t, q_, qd_, tau_cmd, tau_ext});
  }

  const RobotModel& model_;
  const CompParams& params_;
  const AngleMap& map_;
  const Scenario& scenario_;
  Eigen::VectorXd limits_;
  std::map<std::pair<double, double>, RobotModel> plants_;
  Eigen::VectorXd q_, qd_;
  long step_ = 0;
  SimTrace trace_;
};

void check_controller_inputs(const RobotModel& model, const Scenario& scenario) {
  const bool analytic = scenario.controller == ControllerKind::kStatic ||
                        scenario.controller == ControllerKind::kMobile;
  if (analytic && model.dof() != 4) {
    throw DimensionError("closed-form controllers need a 4-joint arm");
  }
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kNone: return "none";
    case ControllerKind::kStatic: return "static";
    case ControllerKind::kMobile: return "mobile";
    case ControllerKind::kOracle: return "oracle";
  }
  return "?";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "none") return ControllerKind::kNone;
  if (name == "static") return ControllerKind::kStatic;
  if (name == "mobile") return ControllerKind::kMobile;
  if (name == "oracle") return ControllerKind::kOracle;
  throw ConfigError("scenario.controller",
                    fmt::format("unknown controller '{}' (none|static|mobile|oracle)",
                                name));
}

void Scenario::validate(std::size_t dof) const {
  const auto n = static_cast<Eigen::Index>(dof);
  if (!(dt > 0.0 && dt <= 0.01)) throw ConfigError("scenario.dt", "must lie in (0, 0.01]");
  if (trace_stride < 1) throw ConfigError("scenario.trace_stride", "must be >= 1");
  if (pose_schedule.empty()) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw ConfigError("scenario.duration", "must be > 0");
    }
    if (q0.size() != n) {
      throw ConfigError("scenario.q0", fmt::format("expected {} joint angles", dof));
    }
  } else {
    if (!(ramp_time > 0.0)) throw ConfigError("scenario.ramp_time", "must be > 0");
    for (std::size_t i = 0; i < pose_schedule.size(); ++i) {
      const auto& p = pose_schedule[i];
      if (p.q.size() != n || !p.q.allFinite()) {
        throw ConfigError(fmt::format("pose.{}.q", i + 1),
                          fmt::format("expected {} finite joint angles", dof));
      }
      if (!(p.hold > 0.0)) throw ConfigError(fmt::format("pose.{}.hold", i + 1), "must be > 0");
    }
  }
  if (q0.size() && !q0.allFinite()) throw ConfigError("scenario.q0", "must be finite");
  if (qd0.size() && (qd0.size() != n || !qd0.allFinite())) {
    throw ConfigError("scenario.qd0", fmt::format("expected {} finite speeds", dof));
  }
  if (torque_limits.size() &&
      (torque_limits.size() != n || (torque_limits.array() <= 0.0).any())) {
    throw ConfigError("scenario.torque_limits",
                      fmt::format("expected {} positive limits", dof));
  }
  if (!torque_limits.size() && clamp && dof != 4 &&
      controller != ControllerKind::kNone) {
    throw ConfigError("scenario.torque_limits", "required for a non-4-joint arm");
  }
  const double total = total_time();
  for (std::size_t i = 0; i < disturbances.size(); ++i) {
    const auto& d = disturbances[i];
    const auto field = [i](const char* key) {
      return fmt::format("disturbance.{}.{}", i + 1, key);
    };
    if (!(d.start >= 0.0 && d.start < d.end && d.end <= total)) {
      throw ConfigError(field("end"),
                        fmt::format("window must satisfy 0 <= start < end <= {}", total));
    }
    if (d.joint < 0 || d.joint >= n) throw ConfigError(field("joint"), "no such joint");
    if (!std::isfinite(d.torque)) throw ConfigError(field("torque"), "must be finite");
  }
  for (std::size_t i = 0; i < pose_profile.size(); ++i) {
    const auto& p = pose_profile[i];
    if (!std::isfinite(p.pose.beta) || !std::isfinite(p.pose.phi) ||
        !std::isfinite(p.start)) {
      throw ConfigError(fmt::format("pose_profile.{}", i + 1), "must be finite");
    }
    if (i > 0 && !(p.start > pose_profile[i - 1].start)) {
      throw ConfigError(fmt::format("pose_profile.{}.start", i + 1),
                        "changes must be in increasing time order");
    }
  }
}

BodyPose Scenario::pose_at(double t) const {
  BodyPose pose;
  for (const auto& change : pose_profile) {
    if (change.start <= t + 1e-9 * dt) pose = change.pose;
  }
  return pose;
}

double Scenario::total_time() const {
  if (pose_schedule.empty()) return duration;
  double total = 0.0;
  for (const auto& p : pose_schedule) total += p.hold;
  return total + ramp_time * static_cast<double>(pose_schedule.size() - 1);
}

SimTrace run_scenario(const RobotModel& model, const CompParams& params,
                      const AngleMap& map, const Scenario& scenario) {
  Scenario plain = scenario;
  plain.pose_schedule.clear();
  plain.validate(model.dof());
  check_controller_inputs(model, plain);
  Simulator sim(model, params, map, plain);
  sim.start(plain.q0, plain.qd0.size() ? plain.qd0
                                       : Eigen::VectorXd::Zero(plain.q0.size()));
  sim.hold(step_count(plain.duration, plain.dt));
  return sim.finish();
}

SimTrace run_pose_schedule(const RobotModel& model, const CompParams& params,
                           const AngleMap& map, const std::vector<PoseHold>& poses,
                           const Scenario& settings) {
  if (poses.empty()) throw InputError("pose schedule is empty");
  Scenario scenario = settings;
  scenario.pose_schedule = poses;
  scenario.validate(model.dof());
  check_controller_inputs(model, scenario);
  Simulator sim(model, params, map, scenario);
  sim.start(poses.front().q, Eigen::VectorXd::Zero(poses.front().q.size()));
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (i > 0) sim.ramp(poses[i].q, step_count(scenario.ramp_time, scenario.dt));
    sim.hold(step_count(poses[i].hold, scenario.dt));
  }
  return sim.finish();
}

SimTrace simulate(const RobotModel& model, const CompParams& params,
                  const AngleMap& map, const Scenario& scenario) {
  if (scenario.pose_schedule.empty()) return run_scenario(model, params, map, scenario);
  return run_pose_schedule(model, params, map, scenario.pose_schedule, scenario);
}

std::vector<TimeWindow> excluded_windows(const Scenario& scenario) {
  std::vector<TimeWindow> windows;
  std::vector<TimeWindow> pushes;
  for (const auto& d : scenario.disturbances) pushes.push_back({d.start, d.end, true});
  std::sort(pushes.begin(), pushes.end(),
            [](const TimeWindow& a, const TimeWindow& b) { return a.start < b.start; });
  for (const auto& w : pushes) {
    if (!windows.empty() && w.start <= windows.back().end) {
      windows.back().end = std::max(windows.back().end, w.end);
    } else {
      windows.push_back(w);
    }
  }
  double t = 0.0;
  for (std::size_t i = 0; i < scenario.pose_schedule.size(); ++i) {
    if (i > 0) {
      windows.push_back({t, t + scenario.ramp_time, false});
      t += scenario.ramp_time;
    }
    t += scenario.pose_schedule[i].hold;
  }
  std::sort(windows.begin(), windows.end(),
            [](const TimeWindow& a, const TimeWindow& b) { return a.start < b.start; });
  return windows;
}

StabilityReport stability_metrics(const SimTrace& trace, const Scenario& scenario) {
  StabilityReport report;
  if (trace.rows.empty()) return report;
  const auto n = trace.rows.front().q.size();
  const double eps = 1e-9 * std::max(trace.dt, 1e-12);
  const auto windows = excluded_windows(scenario);

  const auto excluded = [&](double t) {
    for (const auto& w : windows) {
      if (t >= w.start - eps && t < w.end + kSettleMargin - eps) return true;
    }
    return false;
  };

  report.max_drift = Eigen::VectorXd::Zero(n);
  report.mean_speed = Eigen::VectorXd::Zero(n);
  report.max_speed = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd speed_sum = Eigen::VectorXd::Zero(n);
  std::size_t total_samples = 0;

  std::optional<HoldSegment> open;
  Eigen::VectorXd ref, sum;
  std::size_t count = 0;
  const auto close = [&] {
    if (!open) return;
    open->mean_speed = sum / static_cast<double>(count);
    report.max_drift = report.max_drift.cwiseMax(open->drift);
    report.max_speed = report.max_speed.cwiseMax(open->max_speed);
    report.segments.push_back(*open);
    open.reset();
  };
  for (const auto& row : trace.rows) {
    if (excluded(row.t)) {
      close();
      continue;
    }
    const Eigen::VectorXd speed = row.qd.cwiseAbs();
    if (!open) {
      open = HoldSegment{row.t, row.t, Eigen::VectorXd::Zero(n), {}, speed};
      ref = row.q;
      sum = Eigen::VectorXd::Zero(n);
      count = 0;
    }
    open->end = row.t;
    open->drift = open->drift.cwiseMax((row.q - ref).cwiseAbs());
    open->max_speed = open->max_speed.cwiseMax(speed);
    sum += speed;
    speed_sum += speed;
    ++count;
    ++total_samples;
  }
  close();
  if (total_samples) report.mean_speed = speed_sum / static_cast<double>(total_samples);

  for (const auto& w : windows) {
    if (!w.is_disturbance) continue;
    std::optional<double> settle;
    std::optional<double> quiet_since;
    for (const auto& row : trace.rows) {
      if (row.t < w.end - eps) continue;
      if (row.qd.cwiseAbs().maxCoeff() < kSettleSpeed) {
        if (!quiet_since) quiet_since = row.t;
        if (row.t - *quiet_since >= kSettleHold - eps) {
          settle = *quiet_since - w.end;
          break;
        }
      } else {
        quiet_since.reset();
      }
    }
    report.settle_times.push_back(settle);
  }
  return report;
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  const auto n = trace.rows.empty() ? 0 : trace.rows.front().q.size();
  std::string header = "t";
  for (const char* name : {"q", "qd", "tau_cmd", "tau_ext"}) {
    for (Eigen::Index i = 0; i < n; ++i) header += fmt::format(",{}{}", name, i + 1);
  }
  out << header << '\n';
  std::string line;
  for (const auto& row : trace.rows) {
    line = text::format_double(row.t);
    for (const Eigen::VectorXd* v : {&row.q, &row.qd, &row.tau_cmd, &row.tau_ext}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        line += ',';
        line += text::format_double((*v)[i]);
      }
    }
    out << line << '\n';
  }
}

Scenario load_scenario(std::string_view document) {
  const auto tree = text::parse_ini(document);
  Scenario sc;
  const auto vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))
        .eval();
  };

  const bool schedule = tree.find("pose.1") != tree.not_found();
  // The INI reader drops empty sections, so a schedule may omit [scenario].
  const text::Tree no_settings;
  const auto it = tree.find("scenario");
  if (it == tree.not_found() && !schedule) {
    throw ConfigError("scenario", "missing section");
  }
  text::Section s(it == tree.not_found() ? no_settings : it->second, "scenario");
  sc.dt = s.number("dt", sc.dt);
  sc.controller = parse_controller(s.string("controller", "oracle"));
  sc.clamp = s.boolean("clamp", true);
  sc.ramp_time = s.number("ramp_time", sc.ramp_time);
  sc.trace_stride = static_cast<int>(s.number("trace_stride", 1));
  if (schedule) {
    sc.duration = s.number("duration", 0.0);
    sc.q0 = vec(s.list_or("q0", {}, 0, 64));
  } else {
    sc.duration = s.number("duration");
    sc.q0 = vec(s.list("q0", 1, 64));
  }
  sc.qd0 = vec(s.list_or("qd0", {}, 0, 64));
  sc.torque_limits = vec(s.list_or("torque_limits", {}, 0, 64));
  s.reject_unknown();

  for (const auto& [name, child] : tree) {
    if (child.empty() || name == "scenario") continue;
    const auto dot = name.find('.');
    const auto kind = name.substr(0, dot);
    if (dot == std::string::npos ||
        (kind != "disturbance" && kind != "pose" && kind != "pose_profile")) {
      throw ConfigError(name, "unknown section");
    }
  }
  for (std::size_t i = 1;; ++i) {
    const auto name = fmt::format("disturbance.{}", i);
    const auto d = tree.find(name);
    if (d == tree.not_found()) break;
    text::Section ds(d->second, name);
    sc.disturbances.push_back({ds.number("start"), ds.number("end"),
                               static_cast<int>(ds.number("joint")) - 1,
                               ds.number("torque")});
    ds.reject_unknown();
  }
  for (std::size_t i = 1;; ++i) {
    const auto name = fmt::format("pose_profile.{}", i);
    const auto p = tree.find(name);
    if (p == tree.not_found()) break;
    text::Section ps(p->second, name);
    sc.pose_profile.push_back(
        {ps.number("start"), {ps.number("beta", 0.0), ps.number("phi", 0.0)}});
    ps.reject_unknown();
  }
  for (std::size_t i = 1;; ++i) {
    const auto name = fmt::format("pose.{}", i);
    const auto p = tree.find(name);
    if (p == tree.not_found()) break;
    text::Section ps(p->second, name);
    sc.pose_schedule.push_back({vec(ps.list("q", 1, 64)), ps.number("hold")});
    ps.reject_unknown();
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

}  // namespace gravcomp
