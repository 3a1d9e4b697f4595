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

#include "gravcomp/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace gravcomp {
namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 260.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 60.0;
constexpr std::size_t kMaxPoints = 2000;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename Getter>
std::string panel(const SimTrace& trace, double top, const std::string& label,
                  Getter value) {
  const auto& rows = trace.rows;
  const auto joints = rows.front().q.size();
  const std::size_t stride = std::max<std::size_t>(1, rows.size() / kMaxPoints);
  const double t0 = rows.front().t;
  const double t1 = std::max(rows.back().t, t0 + 1e-9);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : rows) {
    for (Eigen::Index j = 0; j < joints; ++j) {
      lo = std::min(lo, value(row, j));
      hi = std::max(hi, value(row, j));
    }
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = kWidth - kLeft - kRight;
  const auto x_of = [&](double t) { return kLeft + w * (t - t0) / (t1 - t0); };
  const auto y_of = [&](double v) { return top + kPanelHeight * (hi - v) / (hi - lo); };

  std::string out;
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      kLeft, top, w, kPanelHeight);
  out += fmt::format(
      "<text x=\"15\" y=\"{:.1f}\" font-size=\"13\" transform=\"rotate(-90 15 "
      "{:.1f})\" text-anchor=\"middle\">{}</text>\n",
      top + kPanelHeight / 2, top + kPanelHeight / 2, escape(label));
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" "
        "text-anchor=\"end\">{:.3g}</text>\n",
        kLeft - 4, y_of(v) + 3, v);
    const double t = t0 + (t1 - t0) * k / 4.0;
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" "
        "text-anchor=\"middle\">{:.3g}</text>\n",
        x_of(t), top + kPanelHeight + 14, t);
  }
  for (Eigen::Index j = 0; j < joints; ++j) {
    std::string points;
    for (std::size_t i = 0; i < rows.size(); i += stride) {
      points += fmt::format("{:.2f},{:.2f} ", x_of(rows[i].t), y_of(value(rows[i], j)));
    }
    points += fmt::format("{:.2f},{:.2f}", x_of(rows.back().t),
                          y_of(value(rows.back(), j)));
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" "
        "points=\"{}\"/>\n",
        kColors[static_cast<std::size_t>(j) % kColors.size()], points);
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" fill=\"{}\">joint "
        "{}</text>\n",
        kLeft + 8 + 60.0 * static_cast<double>(j), top + 14,
        kColors[static_cast<std::size_t>(j) % kColors.size()], j + 1);
  }
  return out;
}

}  // namespace

std::string plot_trace_svg(const SimTrace& trace, const std::string& title) {
  const double height = kTop + 2 * kPanelHeight + kGap + 40;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" "
      "fill=\"white\"/>\n<text x=\"{}\" y=\"24\" font-size=\"15\" "
      "text-anchor=\"middle\">{}</text>\n",
      kWidth, height, kWidth / 2, escape(title));
  if (!trace.rows.empty()) {
    out += panel(trace, kTop, "position [rad]",
                 [](const TraceRow& r, Eigen::Index j) { return r.q[j]; });
    out += panel(trace, kTop + kPanelHeight + kGap, "velocity [rad/s]",
                 [](const TraceRow& r, Eigen::Index j) { return r.qd[j]; });
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">time "
        "[s]</text>\n",
        kLeft + (kWidth - kLeft - kRight) / 2, height - 8);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gravcomp
