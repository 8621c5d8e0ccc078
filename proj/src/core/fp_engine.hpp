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

#include <span>
#include <vector>

#include "core_model.hpp"
#include "rate_model.hpp"
#include "types.hpp"

// Fractional-programming block coordinate ascent shared by the
// statistical-CSI and imperfect-CSI optimizers.
//
// Each user k is described by quadratic forms in the precoders:
//   desired power          p^H S_k p  = ||G_k^H p||^2
//   own-stream leftover    p^H E_k p  (counted as interference for the own stream)
//   received power         p^H Q_k p, Q_k = S_k + E_k (for every other stream)
// so that
//   gamma_p,i = p_i^H S_i p_i / (sum_{j!=i} p_j^H Q_i p_j + p_i^H E_i p_i + 1)
//   gamma_c,k = p_c^H S_k p_c / (sum_j p_j^H Q_k p_j + p_c^H E_k p_c + 1).
// Statistical CSI: S = C_k, G = C_k^{1/2}, E = 0. Imperfect CSI:
// S = h_hat h_hat^H, G = h_hat, E = C_err,k.

namespace rsris::fp {

using rate::PrecoderSet;

struct UserQuadratic {
  Mat signal;
  Mat signal_root;
  Mat residual;
  Mat interference;
};

UserQuadratic statistical_user(const Mat& cov, const Mat& cov_root);
UserQuadratic estimated_user(const Vec& h_hat, const Mat& err_cov);

/// lambda, lambda_c: SINR auxiliaries. beta, beta_c: quadratic-transform
/// auxiliaries (length = columns of the signal root).
struct Auxiliaries {
  std::vector<double> lambda;
  std::vector<double> lambda_c;
  std::vector<Vec> beta;
  std::vector<Vec> beta_c;
};

rate::SinrSet model_sinrs(std::span<const UserQuadratic> users, const PrecoderSet& p);

/// sum_j p_j^H Q_k p_j + 1
double private_denominator(const UserQuadratic& u, const PrecoderSet& p);
/// sum_j p_j^H Q_k p_j + p_c^H Q_k p_c + 1
double common_denominator(const UserQuadratic& u, const PrecoderSet& p);

void update_lambdas(std::span<const UserQuadratic> users, const PrecoderSet& p, Auxiliaries& aux);
void update_betas(std::span<const UserQuadratic> users, const PrecoderSet& p, Auxiliaries& aux);
/// update_lambdas followed by update_betas.
Auxiliaries tight_auxiliaries(std::span<const UserQuadratic> users, const PrecoderSet& p);

/// Quadratic-transform objective in natural-log units: private terms of all
/// users plus, when `rate_splitting`, the common terms of user k.
double fp_objective(std::span<const UserQuadratic> users, const PrecoderSet& p, const Auxiliaries& aux, int k,
                    bool rate_splitting);

/// Sum of ln(1 + gamma_p,i) plus ln(1 + gamma_c,k) when rate splitting.
double log_rate_for_user(std::span<const UserQuadratic> users, const PrecoderSet& p, int k, bool rate_splitting);

/// Concave quadratic in the stacked precoder v: -v^H A v + 2 Re{b^H v} + u,
/// with the power constraint folded in through 1/Pt identity terms.
struct PrecoderSystem {
  Mat A;
  Vec b;
  double u = 0.0;

  double value(const Vec& v) const;
};

PrecoderSystem assemble_precoder_system(std::span<const UserQuadratic> users, const Auxiliaries& aux, int k,
                                        double pt, bool rate_splitting);

struct PrecoderUpdate {
  PrecoderSet precoders;
  int k_opt = 0;
  std::vector<double> candidate_value;  // NaN for skipped candidates
};

/// Solves A_k v = b_k for every candidate common user, rescales to
/// ||v||^2 = pt and returns the candidate minimizing the objective value.
/// Throws DegenerateState when b_k = 0 for every candidate.
PrecoderUpdate update_precoders(std::span<const UserQuadratic> users, const Auxiliaries& aux, double pt,
                                bool rate_splitting);

/// Phase subproblem  min_k max_{phi_bar} phi_bar^H (B + B_c[k]) phi_bar + t[k].
struct PhaseQuadratic {
  Mat B;
  std::vector<Mat> B_c;
  std::vector<double> t;

  double value(int k, const Vec& phi_bar) const;
};

/// Turns -x^H R x + 2 Re{g^H x} + t0 (x = [phi; 1]) into the bordered form
/// [[-R11, g1 - r12], [., 0]] plus the constant t0 - r22 + 2 Re{g_last}.
struct BorderedForm {
  Mat B;
  double t = 0.0;
};
BorderedForm bordered_from_homogeneous(const Mat& r, const Vec& g, double t0);

/// Global phase fixed so the last entry is real positive, every entry mapped
/// to x_n / |x_n| (1 for |x_n| < 1e-12), last entry set to exactly 1.
Vec project_unit_modulus(const Vec& x);

struct PhaseUpdate {
  model::PhaseConfiguration phi;
  int k_opt = 0;
  double value = 0.0;
  std::vector<double> candidate_value;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iters = 50000;
};

PhaseUpdate update_phases(const PhaseQuadratic& q, const model::PhaseConfiguration& current, bool rate_splitting,
                          const PowerIterationOptions& opts = {});

struct OptimizerConfig {
  double pt = 10.0;  // linear transmit power (= transmit SNR, unit noise)
  int max_iters = 100;
  double rel_tol = 1e-4;
  bool phase_update = true;
  bool rate_splitting = true;
  bool trace = false;
  PowerIterationOptions power_iteration;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double fp_objective = 0.0;   // nats, tight objective for k_opt_precoder after the precoder step
  double sum_rate_bits = 0.0;  // model rate (min over k) after the full iteration
  int k_opt_precoder = 0;
  int k_opt_phase = -1;        // -1 when no phase step ran
  double power_residual = 0.0;
  double core_before = 0.0;    // tight objective for k_opt_precoder before the precoder step
  double core_after = 0.0;     // same user, after the precoder step
  double phase_equivalence_error = 0.0;  // only with trace enabled
};

struct Solution {
  PrecoderSet precoders;
  model::PhaseConfiguration phi;
  rate::RateReport rate;
  std::vector<IterationRecord> trace;
  int iterations_used = 0;
  int common_user = 0;
  double initial_rate_bits = 0.0;
};

/// Problem-specific pieces of the alternating optimization.
class BcdProblem {
 public:
  virtual ~BcdProblem() = default;

  virtual int antennas() const = 0;
  virtual int users() const = 0;
  virtual int ris_elements() const = 0;

  virtual std::vector<UserQuadratic> user_models(const model::PhaseConfiguration& phi) const = 0;

  /// Phase subproblem at the current point. `aux` is tight at (p, phi).
  virtual PhaseQuadratic phase_quadratic(const model::PhaseConfiguration& phi, const PrecoderSet& p,
                                         const Auxiliaries& aux, bool rate_splitting) const = 0;

  /// The phase-step surrogate built at `anchor`, evaluated directly (without
  /// the bordered matrices) at `at`, for common user k.
  virtual double direct_phase_objective(const model::PhaseConfiguration& at, const model::PhaseConfiguration& anchor,
                                        const PrecoderSet& p, const Auxiliaries& aux, int k,
                                        bool rate_splitting) const = 0;
};

/// Alternates auxiliaries, precoders and (optionally) phases until the
/// relative change of the model sum rate drops below cfg.rel_tol.
Solution run_bcd(const BcdProblem& problem, const OptimizerConfig& cfg, PrecoderSet p0,
                 model::PhaseConfiguration phi0);

/// Matched filters to the dominant eigenvectors of the signal matrices with
/// equal power over the active streams; the common precoder follows the
/// dominant eigenvector of the summed signal matrices.
PrecoderSet initial_precoders(std::span<const UserQuadratic> users, double pt, bool rate_splitting);

}  // namespace rsris::fp
