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

#include "stat_csi_optimizer.hpp"

#include <cmath>

#include "linalg.hpp"

namespace rsris::statcsi {

namespace {

using linalg::quad_form;

void check_lambdas(const ChannelStatistics& stats, std::span<const double> lambda,
                   std::span<const double> lambda_c) {
  if (static_cast<int>(lambda.size()) != stats.dims.K || static_cast<int>(lambda_c.size()) != stats.dims.K)
    throw InvalidArgument("lambda count does not match K");
}

// x_1, x_2, x_3 for stream s at user k.
std::array<Vec, 3> split_stream(const ChannelStatistics& stats, const StatisticsRoots& roots,
                                const PhaseConfiguration& phi, const Vec& s, int k, double* l_out) {
  const double l = stats.delta * quad_form(stats.tx_corr, s);
  std::array<Vec, 3> x;
  x[0] = roots.direct_root[k].adjoint() * s;
  if (stats.dims.N > 0) {
    x[1] = roots.ris_root[k].adjoint() * (phi.phi().conjugate().asDiagonal() * (stats.los * s));
    x[2] = std::sqrt(std::max(l, 0.0)) * (roots.hadamard_root[k].adjoint() * phi.phi());
  } else {
    x[1] = Vec::Zero(0);
    x[2] = Vec::Zero(0);
  }
  if (l_out) *l_out = l;
  return x;
}

double sum_quad(const Mat& c, const PrecoderSet& p) {
  double s = 0.0;
  for (const auto& v : p.priv) s += quad_form(c, v);
  return s;
}

}  // namespace

CovarianceSet effective_covariances(const ChannelStatistics& stats, const PhaseConfiguration& phi) {
  CovarianceSet c;
  for (int k = 0; k < stats.dims.K; ++k) {
    auto e = model::effective_covariance_with_root(stats, phi, k);
    c.cov.push_back(std::move(e.cov));
    c.root.push_back(std::move(e.root));
  }
  return c;
}

std::vector<fp::UserQuadratic> user_models(const CovarianceSet& c) {
  std::vector<fp::UserQuadratic> users;
  users.reserve(c.cov.size());
  for (std::size_t k = 0; k < c.cov.size(); ++k) users.push_back(fp::statistical_user(c.cov[k], c.root[k]));
  return users;
}

void update_lambdas(std::span<const Mat> cov, const PrecoderSet& p, Auxiliaries& aux) {
  const auto s = rate::approx_sinrs(cov, p);
  aux.lambda = s.priv;
  aux.lambda_c = s.common;
}

void update_betas(const CovarianceSet& c, const PrecoderSet& p, Auxiliaries& aux) {
  const auto users = user_models(c);
  fp::update_betas(users, p, aux);
}

double fp_objective(const CovarianceSet& c, const PrecoderSet& p, const Auxiliaries& aux, int k,
                    bool rate_splitting) {
  const auto users = user_models(c);
  return fp::fp_objective(users, p, aux, k, rate_splitting);
}

PhaseAuxiliaries refresh_phase_auxiliaries(const ChannelStatistics& stats, const StatisticsRoots& roots,
                                           const PhaseConfiguration& phi, const PrecoderSet& p,
                                           std::span<const double> lambda, std::span<const double> lambda_c) {
  check_lambdas(stats, lambda, lambda_c);
  const int K = stats.dims.K;
  PhaseAuxiliaries a;
  a.x.resize(K);
  a.x_c.resize(K);
  a.beta_m.resize(K);
  a.beta_c_m.resize(K);
  a.a.resize(K);
  a.a_c.resize(K);
  a.l.resize(K);
  a.d.resize(K);
  a.d_c.resize(K);
  a.f = sum_quad(stats.tx_corr, p);
  for (int k = 0; k < K; ++k) {
    const Mat ck = model::effective_covariance(stats, phi, k);
    const double priv_total = sum_quad(ck, p);
    const double den = priv_total + 1.0;
    const double den_c = priv_total + quad_form(ck, p.common) + 1.0;

    a.x[k] = split_stream(stats, roots, phi, p.priv[k], k, &a.l[k]);
    a.x_c[k] = split_stream(stats, roots, phi, p.common, k, &a.l_c);

    const double s = std::sqrt(1.0 + lambda[k]);
    const double sc = std::sqrt(1.0 + lambda_c[k]);
    a.a[k] = 0.0;
    a.a_c[k] = 0.0;
    for (int m = 0; m < 3; ++m) {
      a.beta_m[k][m] = s * a.x[k][m] / den;
      a.beta_c_m[k][m] = sc * a.x_c[k][m] / den_c;
      a.a[k] += a.beta_m[k][m].squaredNorm();
      a.a_c[k] += a.beta_c_m[k][m].squaredNorm();
    }
    a.d[k] = roots.ris_root[k] * a.beta_m[k][1];
    a.d_c[k] = roots.ris_root[k] * a.beta_c_m[k][1];
  }
  return a;
}

PhaseQuadratic build_phase_quadratic(const ChannelStatistics& stats, const StatisticsRoots& roots,
                                     const PrecoderSet& p, std::span<const double> lambda,
                                     std::span<const double> lambda_c, const PhaseAuxiliaries& a,
                                     bool rate_splitting) {
  check_lambdas(stats, lambda, lambda_c);
  const auto [M, K, N] = stats.dims;
  if (p.users() != K || p.antennas() != M) throw InvalidArgument("precoder dimensions do not match statistics");
  const double delta = stats.delta;

  // T_bar p for every stream, and the private outer-product sum.
  std::vector<Vec> y(K);
  Mat y_private = Mat::Zero(N, N);
  for (int i = 0; i < K; ++i) {
    y[i] = stats.los * p.priv[i];
    y_private += y[i] * y[i].adjoint();
  }
  const Vec yc = stats.los * p.common;
  const double pc_tx = quad_form(stats.tx_corr, p.common);

  Mat r = Mat::Zero(N, N);
  Vec g = Vec::Zero(N);
  double t_private = 0.0;
  for (int j = 0; j < K; ++j) {
    const double s = std::sqrt(1.0 + lambda[j]);
    g += s * (a.d[j].conjugate().asDiagonal() * y[j] +
              std::sqrt(std::max(a.l[j], 0.0)) * (roots.hadamard_root[j] * a.beta_m[j][2]));
    r += a.a[j] * y_private.cwiseProduct(stats.ris_cov[j].transpose()) + delta * a.f * a.a[j] * roots.hadamard[j];
    t_private += std::log1p(lambda[j]) - lambda[j] + 2.0 * s * a.beta_m[j][0].dot(a.x[j][0]).real() -
                 a.a[j] * (sum_quad(stats.direct_cov[j], p) + 1.0);
  }

  auto bordered = [N](const Mat& rr, const Vec& gg) {
    Mat b = Mat::Zero(N + 1, N + 1);
    b.topLeftCorner(N, N) = -rr;
    b.col(N).head(N) = gg;
    b.row(N).head(N) = gg.adjoint();
    return linalg::hermitian_part(b);
  };

  PhaseQuadratic q;
  q.B = bordered(r, g);
  q.B_c.assign(K, Mat::Zero(N + 1, N + 1));
  q.t.assign(K, t_private);
  if (!rate_splitting) return q;

  const Mat y_all = y_private + yc * yc.adjoint();
  for (int k = 0; k < K; ++k) {
    const double sc = std::sqrt(1.0 + lambda_c[k]);
    const Vec gc = sc * (a.d_c[k].conjugate().asDiagonal() * yc +
                         std::sqrt(std::max(a.l_c, 0.0)) * (roots.hadamard_root[k] * a.beta_c_m[k][2]));
    const Mat rc = a.a_c[k] * y_all.cwiseProduct(stats.ris_cov[k].transpose()) +
                   delta * (a.f + pc_tx) * a.a_c[k] * roots.hadamard[k];
    q.B_c[k] = bordered(rc, gc);
    q.t[k] += std::log1p(lambda_c[k]) - lambda_c[k] + 2.0 * sc * a.beta_c_m[k][0].dot(a.x_c[k][0]).real() -
              a.a_c[k] * (sum_quad(stats.direct_cov[k], p) + quad_form(stats.direct_cov[k], p.common) + 1.0);
  }
  return q;
}

double phase_surrogate(const ChannelStatistics& stats, const StatisticsRoots& roots, const PhaseConfiguration& phi,
                       const PrecoderSet& p, std::span<const double> lambda, std::span<const double> lambda_c,
                       const PhaseAuxiliaries& a, int k, bool rate_splitting) {
  check_lambdas(stats, lambda, lambda_c);
  const int K = stats.dims.K;
  auto stream_term = [&](int user, const Vec& s, const std::array<Vec, 3>& beta, double lam, double weight,
                         double den) {
    const auto x = split_stream(stats, roots, phi, s, user, nullptr);
    double lin = 0.0;
    for (int m = 0; m < 3; ++m) lin += beta[m].dot(x[m]).real();
    return std::log1p(lam) - lam + 2.0 * std::sqrt(1.0 + lam) * lin - weight * den;
  };
  double f = 0.0;
  for (int i = 0; i < K; ++i) {
    const Mat ci = model::effective_covariance(stats, phi, i);
    f += stream_term(i, p.priv[i], a.beta_m[i], lambda[i], a.a[i], sum_quad(ci, p) + 1.0);
  }
  if (rate_splitting) {
    const Mat ck = model::effective_covariance(stats, phi, k);
    f += stream_term(k, p.common, a.beta_c_m[k], lambda_c[k], a.a_c[k],
                     sum_quad(ck, p) + quad_form(ck, p.common) + 1.0);
  }
  return f;
}

StatCsiProblem::StatCsiProblem(const ChannelStatistics& stats) : stats_(stats), roots_(stats) {}

std::vector<fp::UserQuadratic> StatCsiProblem::user_models(const PhaseConfiguration& phi) const {
  return statcsi::user_models(effective_covariances(stats_, phi));
}

PhaseQuadratic StatCsiProblem::phase_quadratic(const PhaseConfiguration& phi, const PrecoderSet& p,
                                               const Auxiliaries& aux, bool rate_splitting) const {
  const auto pa = refresh_phase_auxiliaries(stats_, roots_, phi, p, aux.lambda, aux.lambda_c);
  return build_phase_quadratic(stats_, roots_, p, aux.lambda, aux.lambda_c, pa, rate_splitting);
}

double StatCsiProblem::direct_phase_objective(const PhaseConfiguration& at, const PhaseConfiguration& anchor,
                                              const PrecoderSet& p, const Auxiliaries& aux, int k,
                                              bool rate_splitting) const {
  const auto pa = refresh_phase_auxiliaries(stats_, roots_, anchor, p, aux.lambda, aux.lambda_c);
  return phase_surrogate(stats_, roots_, at, p, aux.lambda, aux.lambda_c, pa, k, rate_splitting);
}

Solution optimize(const ChannelStatistics& stats, const OptimizerConfig& cfg,
                  std::optional<PrecoderSet> initial_precoders, std::optional<PhaseConfiguration> initial_phi) {
  stats.validate();
  cfg.validate();
  const StatCsiProblem problem(stats);
  PhaseConfiguration phi = initial_phi ? *initial_phi : PhaseConfiguration::ones(stats.dims.N);
  PrecoderSet p = initial_precoders
                      ? *initial_precoders
                      : fp::initial_precoders(problem.user_models(phi), cfg.pt, cfg.rate_splitting);
  return fp::run_bcd(problem, cfg, std::move(p), std::move(phi));
}

}  // namespace rsris::statcsi
