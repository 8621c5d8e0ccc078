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

// Independent evaluations of the statistical-CSI subproblems, shared by the
// unit tests and the acceptance run.

#include <array>
#include <cmath>

#include "linalg.hpp"
#include "stat_csi_optimizer.hpp"
#include "support/test_util.hpp"

namespace rsris::testing {

// Objective of the precoder subproblem for common user k with the unit noise
// replaced by ||v||^2 / Pt, written directly over the precoder blocks.
inline double rescaled_objective(const statcsi::CovarianceSet& cov, double pt, const fp::Auxiliaries& aux, int k,
                                 bool rs, const Vec& v) {
  const int K = static_cast<int>(cov.cov.size());
  const int M = static_cast<int>(cov.cov[0].rows());
  const auto p = rate::PrecoderSet::from_stacked(v, M, K);
  const double noise = v.squaredNorm() / pt;
  double f = 0.0;
  auto term = [&](const Mat& root, const Vec& s, const Vec& beta, double lam, double den) {
    return 2.0 * std::sqrt(1.0 + lam) * beta.dot(root.adjoint() * s).real() - beta.squaredNorm() * den;
  };
  for (int i = 0; i < K; ++i) {
    double den = noise;
    for (int j = 0; j < K; ++j) den += testing::quad(cov.cov[i], p.priv[j]);
    f += term(cov.root[i], p.priv[i], aux.beta[i], aux.lambda[i], den);
  }
  if (rs) {
    double den = noise + testing::quad(cov.cov[k], p.common);
    for (int j = 0; j < K; ++j) den += testing::quad(cov.cov[k], p.priv[j]);
    f += term(cov.root[k], p.common, aux.beta_c[k], aux.lambda_c[k], den);
    f += std::log1p(aux.lambda_c[k]) - aux.lambda_c[k];
  }
  return f;
}

// Surrogate of the phase step evaluated from scratch at phi: every stream's
// received power is split into direct, LoS-cascade and scattered parts with
// fixed auxiliaries; the quadratic penalty uses the full covariance at phi.
inline double reference_phase_surrogate(const ChannelStatistics& s, const Vec& phi, const PrecoderSet& p,
                                        const fp::Auxiliaries& aux, const statcsi::PhaseAuxiliaries& pa, int k,
                                        bool rs) {
  const int K = s.dims.K;
  auto split = [&](int user, const Vec& v) {
    std::array<Vec, 3> x;
    x[0] = linalg::hermitian_sqrt(s.direct_cov[user]) * v;
    x[1] = linalg::hermitian_sqrt(s.ris_cov[user]) * (phi.conjugate().asDiagonal() * (s.los * v));
    const Mat X = s.ris_corr.cwiseProduct(s.ris_cov[user].transpose());
    const double l = s.delta * testing::quad(s.tx_corr, v);
    x[2] = std::sqrt(std::max(l, 0.0)) * (linalg::hermitian_sqrt(X) * phi);
    return x;
  };
  auto term = [&](int user, const Vec& v, const std::array<Vec, 3>& beta, double lam, double den) {
    const auto x = split(user, v);
    double lin = 0.0, a = 0.0;
    for (int m = 0; m < 3; ++m) {
      lin += beta[m].dot(x[m]).real();
      a += beta[m].squaredNorm();
    }
    return std::log1p(lam) - lam + 2.0 * std::sqrt(1.0 + lam) * lin - a * den;
  };
  double f = 0.0;
  for (int i = 0; i < K; ++i) {
    const Mat c = testing::reference_effective_covariance(s, phi, i);
    double den = 1.0;
    for (int j = 0; j < K; ++j) den += testing::quad(c, p.priv[j]);
    f += term(i, p.priv[i], pa.beta_m[i], aux.lambda[i], den);
  }
  if (rs) {
    const Mat c = testing::reference_effective_covariance(s, phi, k);
    double den = 1.0 + testing::quad(c, p.common);
    for (int j = 0; j < K; ++j) den += testing::quad(c, p.priv[j]);
    f += term(k, p.common, pa.beta_c_m[k], aux.lambda_c[k], den);
  }
  return f;
}

}  // namespace rsris::testing
