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

#include "types.hpp"

namespace rsris::eig {

struct EigenPair {
  Vec vector;  // unit norm
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // ||H x - value x||
};

/// Eigenvector for the largest algebraic eigenvalue of a Hermitian matrix by
/// power iteration on H + s I, where s is a Gershgorin bound that makes the
/// shifted matrix positive semidefinite. Stops when
/// ||H x - lambda x|| <= tol * ||H||_F. Throws NonConvergence carrying the
/// last residual after max_iters sweeps.
EigenPair principal_eigenvector(const Mat& h, double tol = 1e-10, int max_iters = 50000, const Vec* start = nullptr);

}  // namespace rsris::eig
