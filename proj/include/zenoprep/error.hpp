// Copyright 2026 The zenoprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace zenoprep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input (lattice shape, config keys, out-of-range parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A requested object would exceed a size budget, or an integer would overflow.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula (arccos, divergent series).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + ")"), message_(what),
        best_residual_(best_residual) {}

  const std::string& message() const noexcept { return message_; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  std::string message_;
  double best_residual_;
};

/// Ground state is (numerically) degenerate; such instances are discarded.
class DegenerateGroundState : public Error {
 public:
  DegenerateGroundState(const std::string& what, double gap)
      : Error(what + " (gap " + std::to_string(gap) + ")"), message_(what), gap_(gap) {}

  const std::string& message() const noexcept { return message_; }
  double gap() const noexcept { return gap_; }

 private:
  std::string message_;
  double gap_;
};

/// Refinement would create an interval narrower than the configured floor.
class StepFloorError : public Error {
 public:
  using Error::Error;
};

}  // namespace zenoprep
