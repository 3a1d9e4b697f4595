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

#ifndef GRAVCOMP_TEXT_FORMAT_HPP_
#define GRAVCOMP_TEXT_FORMAT_HPP_

// Shared helpers for the INI-style documents (robot, scenario, fuzzy net) and
// the CSV outputs.

#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace gravcomp::text {

using Tree = boost::property_tree::ptree;

/// Parses an INI document; throws ConfigError on syntax errors.
Tree parse_ini(std::string_view text);

/// Full-precision decimal (17 significant digits).
std::string format_double(double value);
std::string format_list(const std::vector<double>& values);

double parse_double(std::string_view token, const std::string& field);
std::vector<double> parse_list(std::string_view value, const std::string& field);

/// Typed access to a section. Every lookup records the key so that
/// reject_unknown() can flag typos.
class Section {
 public:
  Section(const Tree& tree, std::string name);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  std::vector<double> list(const std::string& key, std::size_t min_size,
                           std::size_t max_size);
  std::vector<double> list_or(const std::string& key,
                              const std::vector<double>& fallback,
                              std::size_t min_size, std::size_t max_size);
  std::string string(const std::string& key, const std::string& fallback);
  std::string string(const std::string& key);
  bool boolean(const std::string& key, bool fallback);

  std::string field(const std::string& key) const;
  void reject_unknown() const;

 private:
  const Tree* tree_;
  std::string name_;
  std::vector<std::string> seen_;
};

}  // namespace gravcomp::text

#endif  // GRAVCOMP_TEXT_FORMAT_HPP_
