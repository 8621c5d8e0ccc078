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

#include <optional>
#include <span>
#include <vector>

#include "core_model.hpp"
#include "fp_engine.hpp"
#include "random.hpp"
#include "rate_model.hpp"

// Per-coherence-interval benchmark: the same FP/BCD pipeline driven by
// least-squares channel estimates h_hat = h + n and the error covariance.

namespace rsris::impcsi {

using fp::OptimizerConfig;
using fp::Solution;
using model::PhaseConfiguration;
using rate::PrecoderSet;

/// h_hat[k] = h_true[k] + n[k], n[k] ~ CN(0, err_cov[k]).
rate::EstimationModel ls_estimate(std::span<const Vec> h_true, std::span<const Mat> err_cov, RandomStream& rng);

enum class ErrorSplit {
  effective,  // one error vector per user added to the effective channel
  cascaded,   // error spread evenly over the direct link and the N cascaded channels
};

/// One coherence interval. The effective channels are affine in the phases:
///   h_k(phi)     = cascade_true[k] * [phi; 1]
///   h_hat_k(phi) = cascade_est[k]  * [phi; 1]
struct ImperfectScenario {
  std::vector<Mat> cascade_true;
  std::vector<Mat> cascade_est;
  std::vector<Mat> error_cov;
  OptimizerConfig cfg;

  int antennas() const { return static_cast<int>(cascade_true.front().rows()); }
  int users() const { return static_cast<int>(cascade_true.size()); }
  int ris_elements() const { return static_cast<int>(cascade_true.front().cols()) - 1; }

  Vec true_channel(int k, const PhaseConfiguration& phi) const;
  Vec estimated_channel(int k, const PhaseConfiguration& phi) const;
  std::vector<Vec> true_channels(const PhaseConfiguration& phi) const;
  rate::EstimationModel estimation(const PhaseConfiguration& phi) const;

  /// The same estimates with the error covariance forced to zero: the
  /// optimizer then treats the estimates as perfect.
  ImperfectScenario naive() const;
};

/// Builds a scenario from one channel draw. The error covariance is
/// error_budget * I for every user; with ErrorSplit::cascaded each of the
/// N + 1 constituent channels carries error_budget / (N + 1). `phi` is the
/// phase vector at which h_hat = h_true + n is drawn (effective split).
ImperfectScenario make_scenario(const model::ChannelRealization& ch, const PhaseConfiguration& phi,
                                double error_budget, ErrorSplit split, const OptimizerConfig& cfg,
                                RandomStream& rng);

class ImperfectProblem final : public fp::BcdProblem {
 public:
  explicit ImperfectProblem(const ImperfectScenario& scenario) : sc_(scenario) {}

  int antennas() const override { return sc_.antennas(); }
  int users() const override { return sc_.users(); }
  int ris_elements() const override { return sc_.ris_elements(); }

  std::vector<fp::UserQuadratic> user_models(const PhaseConfiguration& phi) const override;
  fp::PhaseQuadratic phase_quadratic(const PhaseConfiguration& phi, const PrecoderSet& p, const fp::Auxiliaries& aux,
                                     bool rate_splitting) const override;
  double direct_phase_objective(const PhaseConfiguration& at, const PhaseConfiguration& anchor,
                                const PrecoderSet& p, const fp::Auxiliaries& aux, int k,
                                bool rate_splitting) const override;

 private:
  const ImperfectScenario& sc_;
};

/// Solution::rate holds the estimate-based objective; evaluate on
/// true_channels() for the achieved rate.
Solution optimize_imperfect(const ImperfectScenario& scenario,
                            std::optional<PhaseConfiguration> initial_phi = std::nullopt,
                            std::optional<PrecoderSet> initial_precoders = std::nullopt);

}  // namespace rsris::impcsi
