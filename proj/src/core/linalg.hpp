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

#include <string>

#include "types.hpp"

namespace rsris::linalg {

/// Hermitian PSD square root S with S * S = A (so S^H = S). Eigenvalues below
/// zero are clipped to zero; A is symmetrized before decomposition.
Mat hermitian_sqrt(const Mat& a);

Mat hermitian_part(const Mat& a);

/// max_ij |A_ij - conj(A_ji)|
double max_asymmetry(const Mat& a);

double min_eigenvalue(const Mat& a);

double real_trace(const Mat& a);

/// Throws InvariantViolation naming `name` when `a` is not square Hermitian
/// within `herm_tol` (absolute, scaled by max(1, max|a_ij|)) or has an
/// eigenvalue below -psd_rel_tol * trace.
void require_hermitian_psd(const std::string& name, const Mat& a, double herm_tol = 1e-10,
                           double psd_rel_tol = 1e-10);

/// Real part of x^H A y.
inline double quad_form(const Mat& a, const Vec& x) { return (x.adjoint() * a * x)(0, 0).real(); }

}  // namespace rsris::linalg
