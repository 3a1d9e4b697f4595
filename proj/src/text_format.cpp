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

#include "gravcomp/text_format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "gravcomp/errors.hpp"

namespace gravcomp::text {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Tree parse_ini(std::string_view text) {
  std::istringstream in{std::string(text)};
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", fmt::format("parse error at line {}: {}", e.line(),
                                      e.message()));
  }
  return tree;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";  // also folds -0 so outputs diff cleanly
  return fmt::format("{:.17g}", value);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

double parse_double(std::string_view token, const std::string& field) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(field, fmt::format("not a number: '{}'", token));
  }
  if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
  return value;
}

std::vector<double> parse_list(std::string_view value, const std::string& field) {
  std::vector<double> out;
  value = trim(value);
  if (value.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(parse_double(value.substr(start, comma - start), field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Section::Section(const Tree& tree, std::string name)
    : tree_(&tree), name_(std::move(name)) {}

bool Section::has(const std::string& key) const {
  return tree_->find(key) != tree_->not_found();
}

std::string Section::field(const std::string& key) const {
  return name_.empty() ? key : name_ + "." + key;
}

std::string Section::string(const std::string& key, const std::string& fallback) {
  seen_.push_back(key);
  const auto it = tree_->find(key);
  if (it == tree_->not_found()) return fallback;
  return std::string(trim(it->second.data()));
}

std::string Section::string(const std::string& key) {
  if (!has(key)) throw ConfigError(field(key), "missing required field");
  return string(key, "");
}

double Section::number(const std::string& key, double fallback) {
  seen_.push_back(key);
  const auto it = tree_->find(key);
  if (it == tree_->not_found()) return fallback;
  return parse_double(it->second.data(), field(key));
}

double Section::number(const std::string& key) {
  if (!has(key)) throw ConfigError(field(key), "missing required field");
  return number(key, 0.0);
}

std::vector<double> Section::list(const std::string& key, std::size_t min_size,
                                  std::size_t max_size) {
  if (!has(key)) throw ConfigError(field(key), "missing required field");
  return list_or(key, {}, min_size, max_size);
}

std::vector<double> Section::list_or(const std::string& key,
                                     const std::vector<double>& fallback,
                                     std::size_t min_size, std::size_t max_size) {
  seen_.push_back(key);
  const auto it = tree_->find(key);
  if (it == tree_->not_found()) return fallback;
  auto values = parse_list(it->second.data(), field(key));
  if (values.size() < min_size || values.size() > max_size) {
    throw ConfigError(field(key),
                      min_size == max_size
                          ? fmt::format("expected {} values, got {}", min_size,
                                        values.size())
                          : fmt::format("expected {}..{} values, got {}",
                                        min_size, max_size, values.size()));
  }
  return values;
}

bool Section::boolean(const std::string& key, bool fallback) {
  const auto value = string(key, fallback ? "true" : "false");
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(field(key), fmt::format("not a boolean: '{}'", value));
}

void Section::reject_unknown() const {
  for (const auto& [key, child] : *tree_) {
    if (!child.empty()) continue;  // nested sections are checked by their owner
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
      throw ConfigError(field(key), "unknown field");
    }
  }
}

}  // namespace gravcomp::text
