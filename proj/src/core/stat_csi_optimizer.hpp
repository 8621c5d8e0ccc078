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

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "core_model.hpp"
#include "fp_engine.hpp"
#include "rate_model.hpp"

// Rate-splitting precoder and RIS phase design from channel statistics only.
// Every step is closed form except the phase update, which takes the
// principal eigenvector of a bordered Hermitian matrix and projects it onto
// the unit circle.

namespace rsris::statcsi {

using fp::Auxiliaries;
using fp::OptimizerConfig;
using fp::PhaseQuadratic;
using fp::Solution;
using model::ChannelStatistics;
using model::PhaseConfiguration;
using model::StatisticsRoots;
using rate::PrecoderSet;

struct CovarianceSet {
  std::vector<Mat> cov;   // C_k
  std::vector<Mat> root;  // C_k^{1/2}
};

CovarianceSet effective_covariances(const ChannelStatistics& stats, const PhaseConfiguration& phi);
std::vector<fp::UserQuadratic> user_models(const CovarianceSet& c);

/// lambda = approximate private SINRs, lambda_c = approximate common SINRs.
void update_lambdas(std::span<const Mat> cov, const PrecoderSet& p, Auxiliaries& aux);
void update_betas(const CovarianceSet& c, const PrecoderSet& p, Auxiliaries& aux);
/// Natural-log objective with the common part of user k.
double fp_objective(const CovarianceSet& c, const PrecoderSet& p, const Auxiliaries& aux, int k,
                    bool rate_splitting = true);

/// Auxiliaries of the phase step. The received power of stream s at user k
/// splits as ||x_1||^2 + ||x_2||^2 + ||x_3||^2 with
///   x_1 = C_d,k^{1/2} s,  x_2 = C_r,k^{1/2} Phi^H T_bar s,  x_3 = sqrt(l) X_k^{1/2} phi,
///   l = delta s^H R_Tx s.
/// Index [k][m] with m = 0, 1, 2.
struct PhaseAuxiliaries {
  std::vector<std::array<Vec, 3>> x, x_c;
  std::vector<std::array<Vec, 3>> beta_m, beta_c_m;
  std::vector<double> a, a_c, l;
  double l_c = 0.0;
  double f = 0.0;  // sum_j p_j^H R_Tx p_j
  std::vector<Vec> d, d_c;
};

struct FpState {
  Auxiliaries aux;
  PhaseAuxiliaries phase;
};

PhaseAuxiliaries refresh_phase_auxiliaries(const ChannelStatistics& stats, const StatisticsRoots& roots,
                                           const PhaseConfiguration& phi, const PrecoderSet& p,
                                           std::span<const double> lambda, std::span<const double> lambda_c);

PhaseQuadratic build_phase_quadratic(const ChannelStatistics& stats, const StatisticsRoots& roots,
                                     const PrecoderSet& p, std::span<const double> lambda,
                                     std::span<const double> lambda_c, const PhaseAuxiliaries& aux,
                                     bool rate_splitting = true);

/// The phase-step surrogate (auxiliaries fixed) evaluated at `phi` through
/// the effective covariances, without the bordered matrices.
double phase_surrogate(const ChannelStatistics& stats, const StatisticsRoots& roots, const PhaseConfiguration& phi,
                       const PrecoderSet& p, std::span<const double> lambda, std::span<const double> lambda_c,
                       const PhaseAuxiliaries& aux, int k, bool rate_splitting = true);

class StatCsiProblem final : public fp::BcdProblem {
 public:
  explicit StatCsiProblem(const ChannelStatistics& stats);

  int antennas() const override { return stats_.dims.M; }
  int users() const override { return stats_.dims.K; }
  int ris_elements() const override { return stats_.dims.N; }

  std::vector<fp::UserQuadratic> user_models(const PhaseConfiguration& phi) const override;
  PhaseQuadratic phase_quadratic(const PhaseConfiguration& phi, const PrecoderSet& p, const Auxiliaries& aux,
                                 bool rate_splitting) const override;
  double direct_phase_objective(const PhaseConfiguration& at, const PhaseConfiguration& anchor,
                                const PrecoderSet& p, const Auxiliaries& aux, int k,
                                bool rate_splitting) const override;

  const ChannelStatistics& statistics() const { return stats_; }
  const StatisticsRoots& roots() const { return roots_; }

 private:
  ChannelStatistics stats_;
  StatisticsRoots roots_;
};

/// Default start: all-ones phases, matched-filter precoders.
Solution optimize(const ChannelStatistics& stats, const OptimizerConfig& cfg,
                  std::optional<PrecoderSet> initial_precoders = std::nullopt,
                  std::optional<PhaseConfiguration> initial_phi = std::nullopt);

}  // namespace rsris::statcsi
