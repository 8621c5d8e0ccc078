// SPDX-License-Identifier: Apache-2.0
//
// rsris - statistical-CSI rate splitting with RIS phase optimization
// Copyright (C) 2026 The rsris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rsris {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Numeric values are part of the C API (rsris_status) and the CLI exit codes.
enum class ErrorCode : int {
  invalid_argument = 2,
  io = 3,
  parse = 4,
  invariant = 5,
  degenerate = 6,
  no_convergence = 7,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(ErrorCode::invariant, what) {}
};

/// Raised by the precoder step when every candidate right-hand side vanishes;
/// the caller must reinitialize the precoders.
class DegenerateState : public Error {
 public:
  explicit DegenerateState(const std::string& what) : Error(ErrorCode::degenerate, what) {}
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(ErrorCode::no_convergence, what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace rsris
