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

#include "power_iteration.hpp"

#include <cmath>
#include <random>

namespace rsris::eig {

namespace {

Vec default_start(Eigen::Index n) {
  std::mt19937_64 gen(0x5eedULL + static_cast<std::uint64_t>(n));
  std::normal_distribution<double> nd;
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(nd(gen), nd(gen));
  return x;
}

double gershgorin_lower(const Mat& h) {
  double lo = INFINITY;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      if (j != i) r += std::abs(h(i, j));
    lo = std::min(lo, h(i, i).real() - r);
  }
  return lo;
}

}  // namespace

EigenPair principal_eigenvector(const Mat& h, double tol, int max_iters, const Vec* start) {
  if (h.rows() != h.cols()) throw InvalidArgument("principal_eigenvector: matrix is not square");
  const Eigen::Index n = h.rows();
  if (n == 0) throw InvalidArgument("principal_eigenvector: empty matrix");

  EigenPair out;
  const double hnorm = h.norm();
  Vec x = (start && start->size() == n && start->norm() > 0.0) ? *start : default_start(n);
  x.normalize();
  if (hnorm == 0.0) {
    out.vector = x;
    return out;
  }
  const double shift = std::max(0.0, -gershgorin_lower(h));
  const double threshold = tol * hnorm;

  Vec hx = h * x;
  double lambda = x.dot(hx).real();
  double residual = (hx - lambda * x).norm();
  int it = 0;
  while (residual > threshold) {
    if (it >= max_iters) {
      throw NonConvergence("power iteration did not converge after " + std::to_string(max_iters) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);
    }
    Vec y = hx + shift * x;
    const double ny = y.norm();
    if (ny == 0.0) break;  // x lies in the null space of H + sI, i.e. lambda = -s is the top eigenvalue
    x = y / ny;
    hx = h * x;
    lambda = x.dot(hx).real();
    residual = (hx - lambda * x).norm();
    ++it;
  }
  out.vector = x;
  out.value = lambda;
  out.iterations = it;
  out.residual = residual;
  return out;
}

}  // namespace rsris::eig
