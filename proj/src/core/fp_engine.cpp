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

#include "fp_engine.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "linalg.hpp"
#include "power_iteration.hpp"

namespace rsris::fp {

namespace {

using linalg::quad_form;

Vec dominant_eigenvector(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(linalg::hermitian_part(a));
  return es.eigenvectors().col(a.rows() - 1);
}

double sum_private_power(const Mat& q, const PrecoderSet& p) {
  double s = 0.0;
  for (const auto& pj : p.priv) s += quad_form(q, pj);
  return s;
}

int candidate_count(int users, bool rate_splitting) { return rate_splitting ? users : 1; }

}  // namespace

UserQuadratic statistical_user(const Mat& cov, const Mat& cov_root) {
  UserQuadratic u;
  u.signal = cov;
  u.signal_root = cov_root;
  u.residual = Mat::Zero(cov.rows(), cov.cols());
  u.interference = cov;
  return u;
}

UserQuadratic estimated_user(const Vec& h_hat, const Mat& err_cov) {
  UserQuadratic u;
  u.signal = h_hat * h_hat.adjoint();
  u.signal_root = h_hat;
  u.residual = err_cov;
  u.interference = u.signal + err_cov;
  return u;
}

rate::SinrSet model_sinrs(std::span<const UserQuadratic> users, const PrecoderSet& p) {
  const int K = p.users();
  if (static_cast<int>(users.size()) != K) throw InvalidArgument("user count does not match precoder set");
  rate::SinrSet s;
  s.priv.resize(K);
  s.common.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto& u = users[k];
    double other = 0.0;
    for (int j = 0; j < K; ++j)
      if (j != k) other += quad_form(u.interference, p.priv[j]);
    s.priv[k] = quad_form(u.signal, p.priv[k]) / (other + quad_form(u.residual, p.priv[k]) + 1.0);
    const double all_private = sum_private_power(u.interference, p);
    s.common[k] = quad_form(u.signal, p.common) / (all_private + quad_form(u.residual, p.common) + 1.0);
  }
  return s;
}

double private_denominator(const UserQuadratic& u, const PrecoderSet& p) {
  return sum_private_power(u.interference, p) + 1.0;
}

double common_denominator(const UserQuadratic& u, const PrecoderSet& p) {
  return sum_private_power(u.interference, p) + quad_form(u.interference, p.common) + 1.0;
}

void update_lambdas(std::span<const UserQuadratic> users, const PrecoderSet& p, Auxiliaries& aux) {
  const auto s = model_sinrs(users, p);
  aux.lambda = s.priv;
  aux.lambda_c = s.common;
}

void update_betas(std::span<const UserQuadratic> users, const PrecoderSet& p, Auxiliaries& aux) {
  const int K = p.users();
  aux.beta.resize(K);
  aux.beta_c.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto& u = users[k];
    aux.beta[k] = std::sqrt(1.0 + aux.lambda[k]) * (u.signal_root.adjoint() * p.priv[k]) / private_denominator(u, p);
    aux.beta_c[k] =
        std::sqrt(1.0 + aux.lambda_c[k]) * (u.signal_root.adjoint() * p.common) / common_denominator(u, p);
  }
}

Auxiliaries tight_auxiliaries(std::span<const UserQuadratic> users, const PrecoderSet& p) {
  Auxiliaries aux;
  update_lambdas(users, p, aux);
  update_betas(users, p, aux);
  return aux;
}

double fp_objective(std::span<const UserQuadratic> users, const PrecoderSet& p, const Auxiliaries& aux, int k,
                    bool rate_splitting) {
  const int K = p.users();
  double f = 0.0;
  if (rate_splitting) {
    const auto& u = users[k];
    const double lc = aux.lambda_c[k];
    f += std::log1p(lc) - lc;
    f += 2.0 * std::sqrt(1.0 + lc) * aux.beta_c[k].dot(u.signal_root.adjoint() * p.common).real();
    f -= aux.beta_c[k].squaredNorm() * common_denominator(u, p);
  }
  for (int i = 0; i < K; ++i) {
    const auto& u = users[i];
    const double li = aux.lambda[i];
    f += std::log1p(li) - li;
    f += 2.0 * std::sqrt(1.0 + li) * aux.beta[i].dot(u.signal_root.adjoint() * p.priv[i]).real();
    f -= aux.beta[i].squaredNorm() * private_denominator(u, p);
  }
  return f;
}

double log_rate_for_user(std::span<const UserQuadratic> users, const PrecoderSet& p, int k, bool rate_splitting) {
  const auto s = model_sinrs(users, p);
  double r = 0.0;
  for (double g : s.priv) r += std::log1p(g);
  if (rate_splitting) r += std::log1p(s.common[k]);
  return r;
}

double PrecoderSystem::value(const Vec& v) const {
  return -quad_form(A, v) + 2.0 * b.dot(v).real() + u;
}

PrecoderSystem assemble_precoder_system(std::span<const UserQuadratic> users, const Auxiliaries& aux, int k,
                                        double pt, bool rate_splitting) {
  const int K = static_cast<int>(users.size());
  const auto M = users[0].interference.rows();
  const double wc = rate_splitting ? aux.beta_c[k].squaredNorm() : 0.0;
  double w = wc;
  Mat private_block = Mat::Zero(M, M);
  for (int i = 0; i < K; ++i) {
    const double wi = aux.beta[i].squaredNorm();
    w += wi;
    private_block += wi * users[i].interference;
  }
  if (rate_splitting) private_block += wc * users[k].interference;
  const Mat eye = Mat::Identity(M, M) * (w / pt);

  PrecoderSystem sys;
  const auto n = static_cast<Eigen::Index>(K + 1) * M;
  sys.A = Mat::Zero(n, n);
  sys.b = Vec::Zero(n);
  sys.A.block(0, 0, M, M) = eye;
  if (rate_splitting) {
    sys.A.block(0, 0, M, M) += wc * users[k].interference;
    sys.b.segment(0, M) = std::sqrt(1.0 + aux.lambda_c[k]) * (users[k].signal_root * aux.beta_c[k]);
    sys.u = std::log1p(aux.lambda_c[k]) - aux.lambda_c[k];
  }
  for (int i = 0; i < K; ++i) {
    const auto off = static_cast<Eigen::Index>(i + 1) * M;
    sys.A.block(off, off, M, M) = private_block + eye;
    sys.b.segment(off, M) = std::sqrt(1.0 + aux.lambda[i]) * (users[i].signal_root * aux.beta[i]);
  }
  return sys;
}

PrecoderUpdate update_precoders(std::span<const UserQuadratic> users, const Auxiliaries& aux, double pt,
                                bool rate_splitting) {
  const int K = static_cast<int>(users.size());
  const int M = static_cast<int>(users[0].interference.rows());
  const int candidates = candidate_count(K, rate_splitting);
  PrecoderUpdate best;
  best.candidate_value.assign(candidates, std::numeric_limits<double>::quiet_NaN());
  double best_value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int k = 0; k < candidates; ++k) {
    const auto sys = assemble_precoder_system(users, aux, k, pt, rate_splitting);
    if (sys.b.squaredNorm() == 0.0) continue;
    Eigen::LLT<Mat> llt(sys.A);
    if (llt.info() != Eigen::Success) continue;
    Vec v = llt.solve(sys.b);
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) continue;
    v *= std::sqrt(pt) / nv;
    const double val = sys.value(v);
    best.candidate_value[k] = val;
    if (val < best_value) {
      best_value = val;
      best.k_opt = k;
      best.precoders = PrecoderSet::from_stacked(v, M, K);
      found = true;
    }
  }
  if (!found) throw DegenerateState("precoder update degenerate: b_k = 0 for every candidate user");
  return best;
}

double PhaseQuadratic::value(int k, const Vec& x) const {
  return quad_form(B + B_c[k], x) + t[k];
}

BorderedForm bordered_from_homogeneous(const Mat& r, const Vec& g, double t0) {
  const auto n = r.rows() - 1;
  BorderedForm out;
  out.B = Mat::Zero(n + 1, n + 1);
  out.B.topLeftCorner(n, n) = -r.topLeftCorner(n, n);
  const Vec border = g.head(n) - r.col(n).head(n);
  out.B.col(n).head(n) = border;
  out.B.row(n).head(n) = border.adjoint();
  out.t = t0 - r(n, n).real() + 2.0 * g(n).real();
  return out;
}

Vec project_unit_modulus(const Vec& x) {
  const auto n = x.size();
  Vec y = x;
  const cd last = x(n - 1);
  if (std::abs(last) > 0.0) y *= std::conj(last) / std::abs(last);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(y(i));
    y(i) = a < 1e-12 ? cd(1.0, 0.0) : y(i) / a;
  }
  y(n - 1) = 1.0;
  return y;
}

PhaseUpdate update_phases(const PhaseQuadratic& q, const model::PhaseConfiguration& current, bool rate_splitting,
                          const PowerIterationOptions& opts) {
  const int candidates = candidate_count(static_cast<int>(q.B_c.size()), rate_splitting);
  const Vec warm = current.augmented();
  const auto n = q.B.rows() - 1;
  PhaseUpdate out;
  out.candidate_value.assign(candidates, std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity();
  Vec best_x;
  for (int k = 0; k < candidates; ++k) {
    const Mat h = q.B + q.B_c[k];
    const auto ep = eig::principal_eigenvector(h, opts.tol, opts.max_iters, &warm);
    Vec x = project_unit_modulus(ep.vector);
    const double val = q.value(k, x);
    out.candidate_value[k] = val;
    if (val < best) {
      best = val;
      out.k_opt = k;
      best_x = std::move(x);
    }
  }
  out.value = best;
  out.phi = model::PhaseConfiguration(best_x.head(n));
  return out;
}

void OptimizerConfig::validate() const {
  if (!(pt > 0.0) || !std::isfinite(pt)) throw InvalidArgument("transmit power must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (power_iteration.max_iters < 1) throw InvalidArgument("power-iteration budget must be >= 1");
  if (!(power_iteration.tol > 0.0)) throw InvalidArgument("power-iteration tolerance must be positive");
}

PrecoderSet initial_precoders(std::span<const UserQuadratic> users, double pt, bool rate_splitting) {
  const int K = static_cast<int>(users.size());
  const auto M = users[0].signal.rows();
  const int streams = K + (rate_splitting ? 1 : 0);
  const double amp = std::sqrt(pt / streams);
  PrecoderSet p(static_cast<int>(M), K);
  Mat total = Mat::Zero(M, M);
  for (int k = 0; k < K; ++k) {
    p.priv[k] = amp * dominant_eigenvector(users[k].signal);
    total += users[k].signal;
  }
  if (rate_splitting) p.common = amp * dominant_eigenvector(total);
  return p;
}

Solution run_bcd(const BcdProblem& problem, const OptimizerConfig& cfg, PrecoderSet p, model::PhaseConfiguration phi) {
  cfg.validate();
  const int N = problem.ris_elements();
  if (phi.size() != N) throw InvalidArgument("initial phase vector length does not match N");
  if (p.users() != problem.users() || p.antennas() != problem.antennas())
    throw InvalidArgument("initial precoders do not match problem dimensions");
  if (!cfg.rate_splitting) p.common.setZero();

  Solution sol;
  auto users = problem.user_models(phi);
  double prev = rate::report_from_sinrs(model_sinrs(users, p)).sum_rate;
  sol.initial_rate_bits = prev;
  rate::RateReport report;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    IterationRecord rec;
    rec.iteration = it;

    auto aux = tight_auxiliaries(users, p);
    const auto upd = update_precoders(users, aux, cfg.pt, cfg.rate_splitting);
    const int k = upd.k_opt;
    rec.k_opt_precoder = k;
    rec.core_before = fp_objective(users, p, aux, k, cfg.rate_splitting);
    p = upd.precoders;
    aux = tight_auxiliaries(users, p);
    rec.core_after = fp_objective(users, p, aux, k, cfg.rate_splitting);
    rec.fp_objective = rec.core_after;

    if (cfg.phase_update && N > 0) {
      const auto pq = problem.phase_quadratic(phi, p, aux, cfg.rate_splitting);
      auto pu = update_phases(pq, phi, cfg.rate_splitting, cfg.power_iteration);
      if (cfg.trace) {
        const double direct = problem.direct_phase_objective(pu.phi, phi, p, aux, pu.k_opt, cfg.rate_splitting);
        rec.phase_equivalence_error = std::abs(pu.value - direct);
      }
      rec.k_opt_phase = pu.k_opt;
      phi = std::move(pu.phi);
      users = problem.user_models(phi);
    }

    report = rate::report_from_sinrs(model_sinrs(users, p));
    rec.sum_rate_bits = report.sum_rate;
    rec.power_residual = std::abs(p.power() - cfg.pt);
    sol.trace.push_back(rec);
    sol.iterations_used = it;
    sol.common_user = k;

    const double rel = std::abs(report.sum_rate - prev) / std::max(prev, 1e-12);
    prev = report.sum_rate;
    if (rel < cfg.rel_tol) break;
  }
  sol.precoders = std::move(p);
  sol.phi = std::move(phi);
  sol.rate = std::move(report);
  return sol;
}

}  // namespace rsris::fp
