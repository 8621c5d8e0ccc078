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

#include <cstdint>
#include <optional>
#include <vector>

#include "random.hpp"
#include "types.hpp"

namespace rsris::model {

struct SystemDims {
  int M = 1;  // BS antennas
  int K = 1;  // single-antenna users
  int N = 0;  // RIS elements, 0 means no RIS

  void validate() const;
  bool operator==(const SystemDims&) const = default;
};

/// Second-order description of the BS-user, RIS-user and BS-RIS links.
///
/// The BS-RIS channel follows a Kronecker model with a deterministic LoS mean:
///   T = los + sqrt(delta) * ris_corr^{1/2} * W * tx_corr^{1/2},  W_ij ~ CN(0, 1)
/// where `los` already carries the sqrt(1 - delta) factor. The BS-RIS
/// large-scale gain lives in `los` and `ris_corr`.
struct ChannelStatistics {
  SystemDims dims;
  std::vector<Mat> direct_cov;  // K matrices, M x M
  std::vector<Mat> ris_cov;     // K matrices, N x N
  Mat los;                      // N x M
  Mat ris_corr;                 // N x N
  Mat tx_corr;                  // M x M
  double delta = 0.0;

  /// Checks dimensions and Hermitian PSD-ness of every matrix. Throws
  /// InvariantViolation naming the offending matrix.
  void validate() const;

  /// The same statistics with the RIS removed (N = 0).
  ChannelStatistics without_ris() const;
};

/// Quantities derived once from a ChannelStatistics object and reused by the
/// sampler and the optimizers.
struct StatisticsRoots {
  std::vector<Mat> direct_root;  // C_d^{1/2}
  std::vector<Mat> ris_root;     // C_r^{1/2}
  std::vector<Mat> hadamard;     // X_k = ris_corr .* C_r^T
  std::vector<Mat> hadamard_root;
  Mat ris_corr_root;
  Mat tx_corr_root;

  explicit StatisticsRoots(const ChannelStatistics& stats);
};

/// Unit-modulus RIS phase vector.
class PhaseConfiguration {
 public:
  PhaseConfiguration() = default;
  /// Throws InvalidArgument unless every |phi_n| = 1 within 1e-12.
  explicit PhaseConfiguration(Vec phi);

  static PhaseConfiguration ones(int n);
  static PhaseConfiguration random(int n, RandomStream& rng);

  const Vec& phi() const { return phi_; }
  int size() const { return static_cast<int>(phi_.size()); }
  /// [phi; 1]
  Vec augmented() const;

 private:
  Vec phi_;
};

struct ChannelRealization {
  std::vector<Vec> direct;     // h_d[k], length M
  std::vector<Vec> ris;        // r[k], length N
  Mat bs_ris;                  // T, N x M
  std::vector<Vec> effective;  // h[k] = h_d[k] + T^H Phi r[k]
};

/// Per-user effective channel as an affine function of the phase vector:
///   h_k(phi) = cascade_k * [phi; 1],  cascade_k = [T^H diag(r_k), h_d,k].
Mat cascade_matrix(const ChannelRealization& ch, int k);

struct PathSpec {
  double angle_deg = 0.0;
  double spread_deg = 0.0;  // rms spread of the Laplacian power-angle density
  double power = 1.0;
};

struct UserSpec {
  std::vector<PathSpec> direct;
  std::vector<PathSpec> ris;
};

/// Parametric scenario from which covariance matrices are synthesized.
struct ScenarioConfig {
  SystemDims dims;
  double delta = 0.5;
  std::uint64_t seed = 1;
  std::optional<double> pt_dB;
  std::vector<UserSpec> users;

  double bs_ris_aod_deg = 0.0;  // LoS departure angle at the BS
  double bs_ris_aoa_deg = 0.0;  // LoS arrival angle at the RIS
  double tx_spread_deg = 5.0;
  double ris_spread_deg = 5.0;

  double direct_gain = 1.0;
  double ris_gain = 1.0;
  double bs_ris_gain = 1.0;

  // Per covariance realization the nominal angles are shifted by
  // U(-angle_jitter_deg, angle_jitter_deg) and path powers scaled by
  // U(power_scale_min, power_scale_max). Zero jitter and unit scales give a
  // fixed geometry.
  double angle_jitter_deg = 0.0;
  double power_scale_min = 1.0;
  double power_scale_max = 1.0;

  void validate() const;
};

/// Unit-norm half-wavelength ULA steering vector.
Vec steering_vector(int n, double angle_rad);

/// Integral of a(theta) a(theta)^H against a Laplacian power-angle density
/// centered at `angle_rad` with rms spread `spread_rad`, truncated to
/// min(pi, 12 spread) around the center and normalized; trace is exactly 1.
Mat angular_covariance(int n, double angle_rad, double spread_rad);

ChannelStatistics synthesize_covariances(const ScenarioConfig& scenario, RandomStream& rng);

/// C_k = C_d,k + los^H Phi C_r,k Phi^H los + delta (phi^H X_k phi) tx_corr
Mat effective_covariance(const ChannelStatistics& stats, const PhaseConfiguration& phi, int k);

struct CovarianceWithRoot {
  Mat cov;
  Mat root;
};
CovarianceWithRoot effective_covariance_with_root(const ChannelStatistics& stats, const PhaseConfiguration& phi,
                                                  int k);

class ChannelSampler {
 public:
  explicit ChannelSampler(const ChannelStatistics& stats);

  /// Draw order: h_d for all users, r for all users, then W row-major.
  ChannelRealization draw(const PhaseConfiguration& phi, RandomStream& rng) const;

  const ChannelStatistics& statistics() const { return stats_; }
  const StatisticsRoots& roots() const { return roots_; }

 private:
  ChannelStatistics stats_;
  StatisticsRoots roots_;
};

ChannelRealization sample_channels(const ChannelStatistics& stats, const PhaseConfiguration& phi, RandomStream& rng);

/// Recomputes effective[k] from direct, ris and bs_ris for a new phase vector.
void apply_phases(ChannelRealization& ch, const PhaseConfiguration& phi);

}  // namespace rsris::model
