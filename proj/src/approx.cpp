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

#include "gravcomp/approx.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "gravcomp/dynamics.hpp"
#include "gravcomp/text_format.hpp"

namespace gravcomp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNetFormatVersion = 1;
constexpr double kMinWidth = 1e-6;

double axis_value(const AxisSpec& axis, int i) {
  return axis.min + (axis.max - axis.min) * i / (axis.count - 1);
}

// Premise state and per-sample intermediate values of a net over a dataset.
struct Evaluation {
  Eigen::MatrixXd firing;      // samples x rules, unnormalized
  Eigen::VectorXd total;       // samples
  Eigen::MatrixXd design;      // samples x rules*(D+1)
};

struct Premise {
  std::vector<std::vector<GaussianMf>> mfs;
};

Eigen::MatrixXd inputs_of(const Dataset& data, const std::vector<int>& inputs) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t n = 0; n < data.size(); ++n) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
          data.q[n][inputs[i]];
    }
  }
  return x;
}

// Firing strength of every rule for one input vector.
template <typename Row>
void rule_strengths(const std::vector<std::vector<GaussianMf>>& mfs, const Row& x,
                    Eigen::Ref<Eigen::VectorXd> out) {
  const auto d = mfs.size();
  const auto k = mfs.front().size();
  out.setOnes();
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    std::size_t code = static_cast<std::size_t>(r);
    for (std::size_t i = d; i-- > 0;) {
      const auto& mf = mfs[i][code % k];
      code /= k;
      const double z = (x[static_cast<Eigen::Index>(i)] - mf.center) / mf.width;
      out[r] *= std::exp(-0.5 * z * z);
    }
  }
}

Evaluation evaluate(const Premise& premise, const Eigen::MatrixXd& x) {
  const auto samples = x.rows();
  const auto d = x.cols();
  Eigen::Index rules = 1;
  for (const auto& m : premise.mfs) rules *= static_cast<Eigen::Index>(m.size());

  Evaluation ev;
  ev.firing.resize(samples, rules);
  ev.total.resize(samples);
  ev.design.resize(samples, rules * (d + 1));
  Eigen::VectorXd w(rules);
  for (Eigen::Index n = 0; n < samples; ++n) {
    rule_strengths(premise.mfs, x.row(n), w);
    ev.firing.row(n) = w.transpose();
    ev.total[n] = w.sum();
    const double inv = 1.0 / ev.total[n];
    for (Eigen::Index r = 0; r < rules; ++r) {
      const double wb = w[r] * inv;
      for (Eigen::Index i = 0; i < d; ++i) {
        ev.design(n, r * (d + 1) + i) = wb * x(n, i);
      }
      ev.design(n, r * (d + 1) + d) = wb;
    }
  }
  return ev;
}

struct Fit {
  Eigen::VectorXd coeffs;
  Eigen::VectorXd prediction;
  double rmse = 0.0;
};

Fit solve_consequents(const Evaluation& ev, const Eigen::VectorXd& target) {
  if (!ev.total.allFinite() || (ev.total.array() <= 0.0).any()) {
    throw NumericalError("training samples fall outside every rule's support");
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ev.design);
  if (qr.rank() < ev.design.cols()) {
    throw SingularMatrixError(fmt::format(
        "singular least-squares system: {} consequent parameters ({} rules) but "
        "rank {} from {} rows",
        ev.design.cols(), ev.firing.cols(), qr.rank(), ev.design.rows()));
  }
  Fit fit;
  fit.coeffs = qr.solve(target);
  fit.prediction = ev.design * fit.coeffs;
  fit.rmse = std::sqrt((fit.prediction - target).squaredNorm() /
                       static_cast<double>(target.size()));
  return fit;
}

// Gradient of half the mean squared error with respect to MF centres and
// widths, consequents held fixed.
Premise premise_gradient(const Premise& premise, const Eigen::MatrixXd& x,
                         const Evaluation& ev, const Fit& fit,
                         const Eigen::VectorXd& target) {
  const auto d = static_cast<std::size_t>(x.cols());
  const auto k = premise.mfs.front().size();
  const auto rules = ev.firing.cols();
  const auto samples = x.rows();
  const auto dp1 = static_cast<Eigen::Index>(d) + 1;

  Premise grad = premise;
  for (auto& input : grad.mfs)
    for (auto& mf : input) mf = {0.0, 0.0};

  std::vector<std::vector<double>> g_mf(d, std::vector<double>(k));
  for (Eigen::Index n = 0; n < samples; ++n) {
    const double err = fit.prediction[n] - target[n];
    const double y = fit.prediction[n];
    for (auto& v : g_mf) std::fill(v.begin(), v.end(), 0.0);
    for (Eigen::Index r = 0; r < rules; ++r) {
      double f = fit.coeffs[r * dp1 + dp1 - 1];
      for (Eigen::Index i = 0; i < dp1 - 1; ++i) f += fit.coeffs[r * dp1 + i] * x(n, i);
      const double g = err * (f - y) * ev.firing(n, r) / ev.total[n];
      std::size_t code = static_cast<std::size_t>(r);
      for (std::size_t i = d; i-- > 0;) {
        g_mf[i][code % k] += g;
        code /= k;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto& mf = premise.mfs[i][j];
        const double dx = x(n, static_cast<Eigen::Index>(i)) - mf.center;
        const double s2 = mf.width * mf.width;
        grad.mfs[i][j].center += g_mf[i][j] * dx / s2;
        grad.mfs[i][j].width += g_mf[i][j] * dx * dx / (s2 * mf.width);
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(samples);
  for (auto& input : grad.mfs) {
    for (auto& mf : input) {
      mf.center *= scale;
      mf.width *= scale;
    }
  }
  return grad;
}

Premise step(const Premise& premise, const Premise& grad, double rate) {
  Premise out = premise;
  for (std::size_t i = 0; i < out.mfs.size(); ++i) {
    for (std::size_t j = 0; j < out.mfs[i].size(); ++j) {
      out.mfs[i][j].center -= rate * grad.mfs[i][j].center;
      out.mfs[i][j].width =
          std::max(kMinWidth, out.mfs[i][j].width - rate * grad.mfs[i][j].width);
    }
  }
  return out;
}

}  // namespace

GridSpec GridSpec::workspace() {
  return GridSpec{{{{kPi / 6, kPi, 13}, {-kPi / 2, kPi / 2, 9}, {0.0, 2 * kPi / 3, 9}}}};
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= static_cast<std::size_t>(std::max(axis.count, 0));
  return n;
}

std::vector<double> Dataset::torques(int joint) const {
  std::vector<double> out;
  out.reserve(tau.size());
  for (const auto& t : tau) out.push_back(t[joint]);
  return out;
}

Dataset generate_dataset(const RobotModel& model, const GridSpec& grid) {
  if (model.dof() != 4) throw DimensionError("dataset generation needs a 4-joint arm");
  for (std::size_t j = 0; j < grid.axes.size(); ++j) {
    const auto& axis = grid.axes[j];
    if (axis.count < 2 || !(axis.max > axis.min) || !std::isfinite(axis.min) ||
        !std::isfinite(axis.max)) {
      throw InputError(fmt::format(
          "joint {} range is empty: need min < max and count >= 2", j + 2));
    }
  }
  Dataset data;
  data.grid = grid;
  data.q.reserve(grid.size());
  data.tau.reserve(grid.size());
  const auto& [a2, a3, a4] = grid.axes;
  for (int i = 0; i < a2.count; ++i) {
    for (int j = 0; j < a3.count; ++j) {
      for (int k = 0; k < a4.count; ++k) {
        const Eigen::Vector4d q(0.0, axis_value(a2, i), axis_value(a3, j),
                                axis_value(a4, k));
        data.q.push_back(q);
        data.tau.push_back(grav_load(model, q));
      }
    }
  }
  return data;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  out << "q1,q2,q3,q4,tau1,tau2,tau3,tau4\n";
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    const auto& q = dataset.q[n];
    const auto& t = dataset.tau[n];
    out << fmt::format("{}\n",
                       text::format_list({q[0], q[1], q[2], q[3], t[0], t[1], t[2],
                                          t[3]}));
  }
}

std::size_t FuzzyNet::rule_count() const {
  std::size_t n = 1;
  for (const auto& m : mfs) n *= m.size();
  return n;
}

Eigen::VectorXd FuzzyNet::firing(const Eigen::Vector4d& q) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = q[inputs[i]];
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(rule_count()));
  rule_strengths(mfs, x, w);
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw OutOfCoverageError(fmt::format(
        "query ({}) lies outside the region the net was trained on",
        fmt::join(q, ", ")));
  }
  return w / total;
}

double predict(const FuzzyNet& net, const Eigen::Vector4d& q) {
  const Eigen::VectorXd wb = net.firing(q);
  const auto d = static_cast<Eigen::Index>(net.inputs.size());
  double y = 0.0;
  for (Eigen::Index r = 0; r < wb.size(); ++r) {
    double f = net.consequents(r, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      f += net.consequents(r, i) * q[net.inputs[static_cast<std::size_t>(i)]];
    }
    y += wb[r] * f;
  }
  return y;
}

TrainResult train(const Dataset& dataset, int joint, const TrainConfig& config) {
  if (dataset.size() == 0) throw InputError("cannot train on an empty dataset");
  if (joint < 0 || joint > 3) throw InputError(fmt::format("bad joint index {}", joint));
  if (config.mfs_per_input < 2) throw InputError("need at least 2 MFs per input");
  if (config.epochs < 1) throw InputError("need at least 1 epoch");
  if (config.inputs.empty()) throw InputError("net needs at least one input");
  for (int i : config.inputs) {
    if (i < 0 || i > 3) throw InputError(fmt::format("bad input index {}", i));
  }
  const auto started = std::chrono::steady_clock::now();

  const Eigen::MatrixXd x = inputs_of(dataset, config.inputs);
  const auto target_values = dataset.torques(joint);
  const Eigen::VectorXd target =
      Eigen::Map<const Eigen::VectorXd>(target_values.data(),
                                        static_cast<Eigen::Index>(target_values.size()));

  // Centres equally spaced over each input's range, neighbouring MFs meeting
  // one standard deviation apart at the midpoint.
  const int k = config.mfs_per_input;
  Premise premise;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double lo = x.col(i).minCoeff();
    const double hi = x.col(i).maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<GaussianMf> mfs;
    for (int j = 0; j < k; ++j) {
      mfs.push_back({lo + span * j / (k - 1), span / (2.0 * (k - 1))});
    }
    premise.mfs.push_back(std::move(mfs));
  }

  Evaluation ev = evaluate(premise, x);
  Fit fit = solve_consequents(ev, target);
  std::vector<double> history;
  double rate = config.learn_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const Premise grad = premise_gradient(premise, x, ev, fit, target);
    for (int attempt = 0; attempt < 10; ++attempt) {
      Premise trial = step(premise, grad, rate);
      Evaluation trial_ev = evaluate(trial, x);
      if (!trial_ev.total.allFinite() || (trial_ev.total.array() <= 0.0).any()) {
        rate *= 0.5;
        continue;
      }
      Fit trial_fit = solve_consequents(trial_ev, target);
      if (trial_fit.rmse <= fit.rmse) {
        premise = std::move(trial);
        ev = std::move(trial_ev);
        fit = std::move(trial_fit);
        rate *= 1.2;
        break;
      }
      rate *= 0.5;
    }
    history.push_back(fit.rmse);
  }

  TrainResult result;
  auto& net = result.net;
  net.output_joint = joint;
  net.inputs = config.inputs;
  net.mfs = premise.mfs;
  const auto dp1 = static_cast<Eigen::Index>(config.inputs.size()) + 1;
  net.consequents = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                   Eigen::Dynamic, Eigen::RowMajor>>(
      fit.coeffs.data(), fit.coeffs.size() / dp1, dp1);
  net.training_rmse = fit.rmse;
  result.rmse_history = std::move(history);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<TrainResult> train_joints(const Dataset& dataset,
                                      const std::vector<int>& joints,
                                      const TrainConfig& config) {
  std::vector<std::future<TrainResult>> jobs;
  for (int joint : joints) {
    jobs.push_back(std::async(std::launch::async, [&dataset, joint, &config] {
      return train(dataset, joint, config);
    }));
  }
  std::vector<TrainResult> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

double rmse(std::span<const double> predictions, std::span<const double> truth) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw DimensionError(fmt::format(
        "rmse needs equal, non-empty lists (got {} and {})", predictions.size(),
        truth.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = predictions[i] - truth[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

std::string serialize_net(const FuzzyNet& net) {
  using text::format_double;
  std::string out;
  out += "format = gravcomp-fuzzy-net\n";
  out += fmt::format("version = {}\n", kNetFormatVersion);
  out += fmt::format("output_joint = {}\n", net.output_joint + 1);
  out += "training_rmse = " + format_double(net.training_rmse) + "\n";
  for (std::size_t i = 0; i < net.inputs.size(); ++i) {
    std::vector<double> centers, widths;
    for (const auto& mf : net.mfs[i]) {
      centers.push_back(mf.center);
      widths.push_back(mf.width);
    }
    out += fmt::format("\n[input.{}]\njoint = {}\n", i + 1, net.inputs[i] + 1);
    out += "centers = " + text::format_list(centers) + "\n";
    out += "widths = " + text::format_list(widths) + "\n";
  }
  for (Eigen::Index r = 0; r < net.consequents.rows(); ++r) {
    const Eigen::VectorXd row = net.consequents.row(r).transpose();
    out += fmt::format("\n[rule.{}]\nconsequent = {}\n", r + 1,
                       text::format_list({row.data(), row.data() + row.size()}));
  }
  return out;
}

FuzzyNet parse_net(std::string_view document) {
  const auto tree = text::parse_ini(document);
  text::Section top(tree, "");
  if (top.string("format") != "gravcomp-fuzzy-net") {
    throw ConfigError("format", "not a fuzzy net file");
  }
  const double version = top.number("version");
  if (version != kNetFormatVersion) {
    throw ConfigError("version", fmt::format("unsupported version {}", version));
  }
  FuzzyNet net;
  net.output_joint = static_cast<int>(top.number("output_joint")) - 1;
  net.training_rmse = top.number("training_rmse", 0.0);
  top.reject_unknown();
  if (net.output_joint < 0 || net.output_joint > 3) {
    throw ConfigError("output_joint", "must be 1..4");
  }

  for (std::size_t i = 1;; ++i) {
    const auto name = fmt::format("input.{}", i);
    const auto it = tree.find(name);
    if (it == tree.not_found()) break;
    text::Section s(it->second, name);
    const int joint = static_cast<int>(s.number("joint")) - 1;
    if (joint < 0 || joint > 3) throw ConfigError(s.field("joint"), "must be 1..4");
    const auto centers = s.list("centers", 1, 64);
    const auto widths = s.list("widths", centers.size(), centers.size());
    s.reject_unknown();
    std::vector<GaussianMf> mfs;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (!(widths[j] > 0.0)) throw ConfigError(s.field("widths"), "must be > 0");
      mfs.push_back({centers[j], widths[j]});
    }
    if (!net.mfs.empty() && mfs.size() != net.mfs.front().size()) {
      throw ConfigError(name, "every input needs the same number of MFs");
    }
    net.inputs.push_back(joint);
    net.mfs.push_back(std::move(mfs));
  }
  if (net.inputs.empty()) throw ConfigError("input.1", "missing section");

  const auto rules = static_cast<Eigen::Index>(net.rule_count());
  const auto dp1 = static_cast<Eigen::Index>(net.inputs.size()) + 1;
  net.consequents.resize(rules, dp1);
  for (Eigen::Index r = 0; r < rules; ++r) {
    const auto name = fmt::format("rule.{}", r + 1);
    const auto it = tree.find(name);
    if (it == tree.not_found()) throw ConfigError(name, "missing section");
    text::Section s(it->second, name);
    const auto row = s.list("consequent", static_cast<std::size_t>(dp1),
                            static_cast<std::size_t>(dp1));
    s.reject_unknown();
    for (Eigen::Index i = 0; i < dp1; ++i) net.consequents(r, i) = row[static_cast<std::size_t>(i)];
  }
  return net;
}

}  // namespace gravcomp
