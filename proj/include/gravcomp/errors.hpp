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

#ifndef GRAVCOMP_ERRORS_HPP_
#define GRAVCOMP_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace gravcomp {

// Bad input: malformed files, invariant violations, mismatched dimensions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The numerics could not produce a result (singular systems, divergence,
// failed calibration).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public InputError {
 public:
  ConfigError(std::string field, const std::string& what)
      : InputError(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gravcomp

#endif  // GRAVCOMP_ERRORS_HPP_
