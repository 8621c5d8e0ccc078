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

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace rsris::linalg {

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat hermitian_sqrt(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("hermitian_sqrt: matrix is not square");
  if (a.rows() == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat& u = es.eigenvectors();
  Mat root = u * ev.cast<cd>().asDiagonal() * u.adjoint();
  return hermitian_part(root);
}

double max_asymmetry(const Mat& a) {
  if (a.rows() != a.cols()) return INFINITY;
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Mat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double real_trace(const Mat& a) { return a.trace().real(); }

void require_hermitian_psd(const std::string& name, const Mat& a, double herm_tol, double psd_rel_tol) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << name << " is not square (" << a.rows() << "x" << a.cols() << ")";
    throw InvariantViolation(os.str());
  }
  if (a.size() == 0) return;
  if (!a.allFinite()) throw InvariantViolation(name + " has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = max_asymmetry(a);
  if (asym > herm_tol * scale) {
    std::ostringstream os;
    os.precision(6);
    os << name << " is not Hermitian: max asymmetry " << asym;
    throw InvariantViolation(os.str());
  }
  const double tr = real_trace(a);
  const double lmin = min_eigenvalue(a);
  if (lmin < -psd_rel_tol * std::max(tr, 0.0)) {
    std::ostringstream os;
    os.precision(6);
    os << name << " is not positive semidefinite: min eigenvalue " << lmin << " (trace " << tr << ")";
    throw InvariantViolation(os.str());
  }
}

}  // namespace rsris::linalg
