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

#include "imperfect_csi_optimizer.hpp"

#include <cmath>

#include "linalg.hpp"

namespace rsris::impcsi {

rate::EstimationModel ls_estimate(std::span<const Vec> h_true, std::span<const Mat> err_cov, RandomStream& rng) {
  if (h_true.size() != err_cov.size()) throw InvalidArgument("channel and error covariance counts differ");
  rate::EstimationModel est;
  for (std::size_t k = 0; k < h_true.size(); ++k) {
    const Mat root = linalg::hermitian_sqrt(err_cov[k]);
    est.estimate.push_back(h_true[k] + root * rng.complex_normal_vector(h_true[k].size()));
    est.error_cov.push_back(err_cov[k]);
  }
  return est;
}

Vec ImperfectScenario::true_channel(int k, const PhaseConfiguration& phi) const {
  return cascade_true[k] * phi.augmented();
}

Vec ImperfectScenario::estimated_channel(int k, const PhaseConfiguration& phi) const {
  return cascade_est[k] * phi.augmented();
}

std::vector<Vec> ImperfectScenario::true_channels(const PhaseConfiguration& phi) const {
  std::vector<Vec> h;
  for (int k = 0; k < users(); ++k) h.push_back(true_channel(k, phi));
  return h;
}

rate::EstimationModel ImperfectScenario::estimation(const PhaseConfiguration& phi) const {
  rate::EstimationModel est;
  for (int k = 0; k < users(); ++k) est.estimate.push_back(estimated_channel(k, phi));
  est.error_cov = error_cov;
  return est;
}

ImperfectScenario ImperfectScenario::naive() const {
  ImperfectScenario out = *this;
  for (auto& e : out.error_cov) e.setZero();
  return out;
}

ImperfectScenario make_scenario(const model::ChannelRealization& ch, const PhaseConfiguration& phi,
                                double error_budget, ErrorSplit split, const OptimizerConfig& cfg,
                                RandomStream& rng) {
  if (!(error_budget >= 0.0)) throw InvalidArgument("error budget must be non-negative");
  const auto K = static_cast<int>(ch.direct.size());
  ImperfectScenario sc;
  sc.cfg = cfg;
  for (int k = 0; k < K; ++k) sc.cascade_true.push_back(model::cascade_matrix(ch, k));
  const auto M = sc.cascade_true.front().rows();
  const auto cols = sc.cascade_true.front().cols();
  sc.error_cov.assign(K, Mat::Identity(M, M) * error_budget);
  sc.cascade_est = sc.cascade_true;
  if (split == ErrorSplit::effective) {
    std::vector<Vec> h;
    for (int k = 0; k < K; ++k) h.push_back(sc.true_channel(k, phi));
    const auto est = ls_estimate(h, sc.error_cov, rng);
    for (int k = 0; k < K; ++k) sc.cascade_est[k].col(cols - 1) += est.estimate[k] - h[k];
  } else {
    const double s = std::sqrt(error_budget / static_cast<double>(cols));
    for (int k = 0; k < K; ++k)
      for (Eigen::Index c = 0; c < cols; ++c) sc.cascade_est[k].col(c) += s * rng.complex_normal_vector(M);
  }
  return sc;
}

std::vector<fp::UserQuadratic> ImperfectProblem::user_models(const PhaseConfiguration& phi) const {
  std::vector<fp::UserQuadratic> users;
  for (int k = 0; k < sc_.users(); ++k) users.push_back(fp::estimated_user(sc_.estimated_channel(k, phi), sc_.error_cov[k]));
  return users;
}

fp::PhaseQuadratic ImperfectProblem::phase_quadratic(const PhaseConfiguration&, const PrecoderSet& p,
                                                     const fp::Auxiliaries& aux, bool rate_splitting) const {
  using linalg::quad_form;
  const int K = sc_.users();
  const auto n1 = sc_.cascade_est.front().cols();

  // w[k][j] = cascade_est[k]^H p_j, so h_hat_k(phi)^H p_j = phi_bar^H w[k][j].
  auto private_weights = [&](int k) {
    std::vector<Vec> w;
    for (int j = 0; j < K; ++j) w.push_back(sc_.cascade_est[k].adjoint() * p.priv[j]);
    return w;
  };

  Mat r = Mat::Zero(n1, n1);
  Vec g = Vec::Zero(n1);
  double t0 = 0.0;
  for (int i = 0; i < K; ++i) {
    const auto w = private_weights(i);
    const cd beta = aux.beta[i](0);
    const double b2 = std::norm(beta);
    for (int j = 0; j < K; ++j) r += b2 * (w[j] * w[j].adjoint());
    g += std::sqrt(1.0 + aux.lambda[i]) * std::conj(beta) * w[i];
    double err = 0.0;
    for (int j = 0; j < K; ++j) err += quad_form(sc_.error_cov[i], p.priv[j]);
    t0 += std::log1p(aux.lambda[i]) - aux.lambda[i] - b2 * (err + 1.0);
  }
  const auto priv = fp::bordered_from_homogeneous(r, g, t0);

  fp::PhaseQuadratic q;
  q.B = linalg::hermitian_part(priv.B);
  q.B_c.assign(K, Mat::Zero(n1, n1));
  q.t.assign(K, priv.t);
  if (!rate_splitting) return q;

  for (int k = 0; k < K; ++k) {
    const auto w = private_weights(k);
    const Vec wc = sc_.cascade_est[k].adjoint() * p.common;
    const cd beta = aux.beta_c[k](0);
    const double b2 = std::norm(beta);
    Mat rc = b2 * (wc * wc.adjoint());
    for (int j = 0; j < K; ++j) rc += b2 * (w[j] * w[j].adjoint());
    const Vec gc = std::sqrt(1.0 + aux.lambda_c[k]) * std::conj(beta) * wc;
    double err = quad_form(sc_.error_cov[k], p.common);
    for (int j = 0; j < K; ++j) err += quad_form(sc_.error_cov[k], p.priv[j]);
    const double tc = std::log1p(aux.lambda_c[k]) - aux.lambda_c[k] - b2 * (err + 1.0);
    const auto common = fp::bordered_from_homogeneous(rc, gc, tc);
    q.B_c[k] = linalg::hermitian_part(common.B);
    q.t[k] += common.t;
  }
  return q;
}

double ImperfectProblem::direct_phase_objective(const PhaseConfiguration& at, const PhaseConfiguration&,
                                                const PrecoderSet& p, const fp::Auxiliaries& aux, int k,
                                                bool rate_splitting) const {
  return fp::fp_objective(user_models(at), p, aux, k, rate_splitting);
}

Solution optimize_imperfect(const ImperfectScenario& scenario, std::optional<PhaseConfiguration> initial_phi,
                            std::optional<PrecoderSet> initial_precoders) {
  scenario.cfg.validate();
  if (scenario.cascade_true.empty()) throw InvalidArgument("scenario has no users");
  const ImperfectProblem problem(scenario);
  PhaseConfiguration phi = initial_phi ? *initial_phi : PhaseConfiguration::ones(scenario.ris_elements());
  PrecoderSet p = initial_precoders ? *initial_precoders
                                    : fp::initial_precoders(problem.user_models(phi), scenario.cfg.pt,
                                                            scenario.cfg.rate_splitting);
  return fp::run_bcd(problem, scenario.cfg, std::move(p), std::move(phi));
}

}  // namespace rsris::impcsi
