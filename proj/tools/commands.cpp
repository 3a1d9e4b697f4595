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

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "gravcomp/controller.hpp"
#include "gravcomp/dynamics.hpp"
#include "gravcomp/errors.hpp"
#include "gravcomp/plot.hpp"
#include "gravcomp/sim.hpp"
#include "gravcomp/text_format.hpp"

namespace gravcomp::cli {
namespace {

using text::format_double;

std::ofstream open_output(const GlobalOptions& global, const std::string& name) {
  std::filesystem::create_directories(global.out);
  const auto path = global.out / name;
  std::ofstream file(path);
  if (!file) throw InputError("cannot write " + path.string());
  return file;
}

Calibration calibrate(const RobotModel& model, const CompParams& params) {
  return calibrate_angle_map(model, params);
}

void print_map(std::ostream& out, const Calibration& cal) {
  fmt::print(out, "angle map: theta = sign * q + offset\n");
  for (Eigen::Index i = 0; i < cal.map.sign.size(); ++i) {
    fmt::print(out, "  joint {}: sign {:+.0f}  offset {:+.6f} rad\n", i + 1,
               cal.map.sign[i], cal.map.offset[i]);
  }
  fmt::print(out, "probe residual: {:.3e} (N m)^2\n", cal.residual);
}

std::vector<double> column(const std::vector<Eigen::Vector4d>& rows, int j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

void write_report(std::ostream& out, const Scenario& sc, const StabilityReport& r) {
  fmt::print(out, "controller: {}\n", to_string(sc.controller));
  fmt::print(out, "hold segments: {}\n", r.segments.size());
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const auto& s = r.segments[i];
    fmt::print(out, "segment {}: t = [{:.3f}, {:.3f}] s\n", i + 1, s.start, s.end);
    fmt::print(out, "  drift [rad]:        {:.3e}\n", fmt::join(s.drift, ", "));
    fmt::print(out, "  mean |qd| [rad/s]:  {:.3e}\n", fmt::join(s.mean_speed, ", "));
    fmt::print(out, "  max |qd| [rad/s]:   {:.3e}\n", fmt::join(s.max_speed, ", "));
  }
  if (!r.segments.empty()) {
    fmt::print(out, "max drift [rad]: {:.3e}\n", fmt::join(r.max_drift, ", "));
    fmt::print(out, "mean |qd| [rad/s]: {:.3e}\n", fmt::join(r.mean_speed, ", "));
    fmt::print(out, "max |qd| [rad/s]: {:.3e}\n", fmt::join(r.max_speed, ", "));
  }
  for (std::size_t i = 0; i < r.settle_times.size(); ++i) {
    if (r.settle_times[i]) {
      fmt::print(out, "disturbance {}: settled {:.3f} s after release\n", i + 1,
                 *r.settle_times[i]);
    } else {
      fmt::print(out, "disturbance {}: did not settle\n", i + 1);
    }
  }
}

}  // namespace

GridSpec GridOptions::spec() const {
  auto grid = GridSpec::workspace();
  for (std::size_t i = 0; i < 3; ++i) grid.axes[i].count = counts[i];
  return grid;
}

RobotModel load_model(const GlobalOptions& global) {
  RobotModel model =
      global.robot.empty() ? exoskeleton_default() : load_robot_file(global.robot);
  if (global.gravity) model = model.with_gravity(*global.gravity);
  return model;
}

int cmd_robot(const GlobalOptions& global, std::ostream& out) {
  out << to_config_text(load_model(global));
  return 0;
}

int cmd_gravload(const GlobalOptions& global, const std::vector<double>& q,
                 std::ostream& out) {
  const auto model = load_model(global);
  const Eigen::VectorXd joints =
      Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  const auto tau = grav_load(model, joints);
  for (Eigen::Index i = 0; i < tau.size(); ++i) {
    fmt::print(out, "tau{} = {} N m\n", i + 1, format_double(tau[i]));
  }
  return 0;
}

int cmd_calibrate(const GlobalOptions& global, std::ostream& out) {
  const auto model = load_model(global);
  print_map(out, calibrate(model, CompParams::from_model(model)));
  return 0;
}

int cmd_compare(const GlobalOptions& global, const CompareOptions& options,
                std::ostream& out) {
  const auto model = load_model(global);
  const auto params = CompParams::from_model(model);
  const auto cal = calibrate(model, params);
  print_map(out, cal);

  const auto data = generate_dataset(model, options.grid.spec());
  std::vector<Eigen::Vector4d> analytic;
  analytic.reserve(data.size());
  for (const auto& q : data.q) {
    analytic.push_back(static_gravity_torque(params, map_angles(cal.map, q).head<4>()));
  }
  std::vector<TrainResult> nets;
  if (options.train) nets = train_joints(data, {1, 2, 3}, options.train_config);

  auto csv = open_output(global, "compare_residuals.csv");
  csv << "q1,q2,q3,q4,oracle2,oracle3,oracle4,analytic_err2,analytic_err3,analytic_err4";
  if (options.train) csv << ",net_err2,net_err3,net_err4";
  csv << '\n';
  std::vector<Eigen::Vector4d> predicted(data.size(), Eigen::Vector4d::Zero());
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string line = text::format_list({data.q[i].begin(), data.q[i].end()});
    for (int j = 1; j < 4; ++j) line += "," + format_double(data.tau[i][j]);
    for (int j = 1; j < 4; ++j) line += "," + format_double(analytic[i][j] - data.tau[i][j]);
    for (std::size_t k = 0; k < nets.size(); ++k) {
      const int j = static_cast<int>(k) + 1;
      predicted[i][j] = predict(nets[k].net, data.q[i]);
      line += "," + format_double(predicted[i][j] - data.tau[i][j]);
    }
    // format_list separates with ", "; keep CSV cells tight.
    std::erase(line, ' ');
    csv << line << '\n';
  }

  auto summary = open_output(global, "compare_summary.csv");
  summary << "joint,analytical_rmse,net_rmse\n";
  fmt::print(out, "\n{} poses\n", data.size());
  fmt::print(out, "{:>5}  {:>22}  {:>22}  {:>12}\n", "joint", "analytical RMSE [N m]",
             "neuro-fuzzy RMSE [N m]", "ratio");
  for (int j = 1; j < 4; ++j) {
    const auto truth = data.torques(j);
    const double law = rmse(column(analytic, j), truth);
    if (options.train) {
      const double net = rmse(column(predicted, j), truth);
      fmt::print(out, "{:>5}  {:>22.3e}  {:>22.3e}  {:>12.3e}\n", j + 1, law, net,
                 law > 0.0 ? net / law : INFINITY);
      summary << j + 1 << ',' << format_double(law) << ',' << format_double(net) << '\n';
    } else {
      fmt::print(out, "{:>5}  {:>22.3e}  {:>22}  {:>12}\n", j + 1, law, "-", "-");
      summary << j + 1 << ',' << format_double(law) << ",\n";
    }
  }

  // The printed mobile law scales joints 2-4 by cos(theta1); the static law
  // does not. Quantify the gap at level trunk for a few shoulder angles.
  fmt::print(out, "\nmobile vs static law at beta = phi = 0 (RMSE over the grid):\n");
  fmt::print(out, "{:>12}  {:>12}  {:>12}  {:>12}\n", "theta1 [rad]", "joint 2",
             "joint 3", "joint 4");
  for (double theta1 : options.shoulder_angles) {
    std::array<double, 3> gap{};
    for (const auto& q : data.q) {
      Eigen::Vector4d theta = map_angles(cal.map, q).head<4>();
      theta[0] = theta1;
      const auto diff = (mobile_gravity_torque(params, theta, {}) -
                         static_gravity_torque(params, theta))
                            .eval();
      for (int j = 0; j < 3; ++j) gap[j] += diff[j + 1] * diff[j + 1];
    }
    for (auto& g : gap) g = std::sqrt(g / static_cast<double>(data.size()));
    fmt::print(out, "{:>12.3f}  {:>12.3e}  {:>12.3e}  {:>12.3e}\n", theta1, gap[0],
               gap[1], gap[2]);
  }
  fmt::print(out, "\nwrote {}\n", (global.out / "compare_residuals.csv").string());
  return 0;
}

int cmd_train(const GlobalOptions& global, const TrainOptions& options,
              std::ostream& out) {
  const auto model = load_model(global);
  const auto data = generate_dataset(model, options.grid.spec());
  std::vector<int> joints;
  for (int j : options.joints) {
    if (j < 1 || j > 4) throw InputError(fmt::format("no joint {}", j));
    joints.push_back(j - 1);
  }
  const auto results = train_joints(data, joints, options.config);

  auto history = open_output(global, "train_rmse.csv");
  history << "epoch";
  for (int j : options.joints) history << ",joint" << j;
  history << '\n';
  for (int e = 0; e < options.config.epochs; ++e) {
    history << e + 1;
    for (const auto& r : results) {
      history << ',' << format_double(r.rmse_history[static_cast<std::size_t>(e)]);
    }
    history << '\n';
  }

  auto log = open_output(global, "train_log.txt");
  fmt::print(log, "poses: {}\nmfs per input: {}\nepochs: {}\nlearn rate: {}\n",
             data.size(), options.config.mfs_per_input, options.config.epochs,
             options.config.learn_rate);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const int joint = options.joints[k];
    const auto name = fmt::format("net_joint{}.ini", joint);
    open_output(global, name) << serialize_net(r.net);
    const auto line = fmt::format("joint {}: rmse {:.3e} N m, {} rules, {:.2f} s -> {}\n",
                                  joint, r.net.training_rmse, r.net.rule_count(),
                                  r.wall_seconds, name);
    log << line;
    out << line;
  }
  return 0;
}

int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options,
                 std::ostream& out) {
  const auto model = load_model(global);
  const auto scenario = load_scenario_file(options.scenario);
  const bool analytic = scenario.controller == ControllerKind::kStatic ||
                        scenario.controller == ControllerKind::kMobile;
  CompParams params;
  AngleMap map = AngleMap::identity(static_cast<Eigen::Index>(model.dof()));
  if (analytic) {
    params = CompParams::from_model(model);
    map = calibrate(model, params).map;
  }

  SimTrace trace;
  try {
    trace = simulate(model, params, map, scenario);
  } catch (const DivergenceError& e) {
    auto csv = open_output(global, "trace.csv");
    write_trace_csv(e.prefix(), csv);
    throw;
  }
  auto csv = open_output(global, "trace.csv");
  write_trace_csv(trace, csv);

  const auto report = stability_metrics(trace, scenario);
  auto report_file = open_output(global, "report.txt");
  write_report(report_file, scenario, report);
  write_report(out, scenario, report);
  if (options.plot) {
    open_output(global, "trace.svg")
        << plot_trace_svg(trace, options.scenario.filename().string());
  }
  return 0;
}

}  // namespace gravcomp::cli
