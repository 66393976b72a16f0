// Copyright 2026 The epcload Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace epcload {

/// Invalid or missing configuration value. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Unreadable or unusable input/output file. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that parsed but cannot be used (e.g. a trace with no valid rows).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root bracketing or evaluation failure inside a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Offered load at the MME is at or above its capacity (rho >= 1).
/// Maps to CLI exit code 4.
class OverloadError : public std::runtime_error {
 public:
  OverloadError(double rho, const std::string& what)
      : std::runtime_error(what), rho_(rho) {}

  double rho() const noexcept { return rho_; }

  /// Infimum of the capacity multipliers that bring the load below 1;
  /// any multiplier strictly above this value is stable.
  double min_multiplier() const noexcept { return rho_; }

 private:
  double rho_;
};

}  // namespace epcload
