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

#ifndef GRAVCOMP_PLOT_HPP_
#define GRAVCOMP_PLOT_HPP_

#include <string>

#include "gravcomp/sim.hpp"

namespace gravcomp {

/// Two stacked panels, joint positions over time on top and joint speeds
/// below, as a standalone SVG document.
std::string plot_trace_svg(const SimTrace& trace, const std::string& title);

}  // namespace gravcomp

#endif  // GRAVCOMP_PLOT_HPP_
