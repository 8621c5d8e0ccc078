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
#include "random.hpp"
#include "types.hpp"

namespace rsris::rate {

/// Common precoder plus K private precoders. The stacked vector places the
/// common block first, then private blocks 1..K (block i at offset (i+1)M).
struct PrecoderSet {
  Vec common;
  std::vector<Vec> priv;

  PrecoderSet() = default;
  PrecoderSet(int M, int K) : common(Vec::Zero(M)), priv(K, Vec::Zero(M)) {}

  int antennas() const { return static_cast<int>(common.size()); }
  int users() const { return static_cast<int>(priv.size()); }
  double power() const;
  Vec stacked() const;
  static PrecoderSet from_stacked(const Vec& v, int M, int K);
};

struct SinrSet {
  std::vector<double> priv;
  std::vector<double> common;
};

struct RateReport {
  std::vector<double> private_rate;           // bits per channel use
  std::vector<double> common_rate_candidate;  // bits per channel use, per user
  int common_user = 0;
  double sum_rate = 0.0;
  std::optional<double> std_error;
};

/// Private/common rates from SINRs; the common rate is the minimum candidate.
RateReport report_from_sinrs(const SinrSet& sinrs);

/// Covariance-based SINR approximations (unit noise).
SinrSet approx_sinrs(std::span<const Mat> cov, const PrecoderSet& p);
RateReport approx_sum_rate(std::span<const Mat> cov, const PrecoderSet& p);

/// SINRs of one channel realization (unit noise).
SinrSet instantaneous_sinrs(std::span<const Vec> h, const PrecoderSet& p);

struct EstimationModel {
  std::vector<Vec> estimate;   // h_hat[k]
  std::vector<Mat> error_cov;  // C_err[k]
};

/// Approximate SINRs under imperfect CSI; the error covariance enters every
/// denominator and, for the common stream, once more for its own term.
SinrSet imperfect_sinrs(const EstimationModel& est, const PrecoderSet& p);

/// Monte Carlo estimate of the ergodic RSMA sum rate. The private part is the
/// sample mean of sum_i log2(1 + gamma_p,i); the common part is the minimum
/// over users of the per-user sample means of log2(1 + gamma_c,k). The
/// standard error is that of the per-draw sum (private + selected user's
/// common rate).
RateReport ergodic_sum_rate_mc(const model::ChannelSampler& sampler, const model::PhaseConfiguration& phi,
                               const PrecoderSet& p, int n_samples, RandomStream& rng);
RateReport ergodic_sum_rate_mc(const model::ChannelStatistics& stats, const model::PhaseConfiguration& phi,
                               const PrecoderSet& p, int n_samples, RandomStream& rng);

/// Streaming accumulator behind ergodic_sum_rate_mc, reused by the harness
/// for per-realization evaluations.
class ErgodicAccumulator {
 public:
  explicit ErgodicAccumulator(int users);
  void add(const SinrSet& sinrs);
  RateReport report() const;
  int count() const { return n_; }

 private:
  int users_;
  int n_ = 0;
  double private_sum_ = 0.0;
  std::vector<double> private_user_sum_;
  std::vector<double> private_draws_;
  std::vector<std::vector<double>> common_draws_;
};

}  // namespace rsris::rate
