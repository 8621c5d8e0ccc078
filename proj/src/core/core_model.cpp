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

#include "core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "linalg.hpp"

namespace rsris::model {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kQuadraturePointsPerSide = 1024;

void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

Mat hadamard_with_transpose(const Mat& corr, const Mat& cov) { return corr.cwiseProduct(cov.transpose()); }

}  // namespace

void SystemDims::validate() const {
  require(M >= 1, "M must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(N >= 0, "N must be >= 0");
}

void ChannelStatistics::validate() const {
  dims.validate();
  const auto M = dims.M;
  const auto N = dims.N;
  auto shape = [](const std::string& name, const Mat& a, Eigen::Index r, Eigen::Index c) {
    if (a.rows() != r || a.cols() != c) {
      std::ostringstream os;
      os << name << " has shape " << a.rows() << "x" << a.cols() << ", expected " << r << "x" << c;
      throw InvariantViolation(os.str());
    }
  };
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvariantViolation("delta must lie in [0, 1]");
  if (static_cast<int>(direct_cov.size()) != dims.K || static_cast<int>(ris_cov.size()) != dims.K)
    throw InvariantViolation("per-user covariance count does not match K");
  for (int k = 0; k < dims.K; ++k) {
    const std::string dn = "C_d[" + std::to_string(k) + "]";
    const std::string rn = "C_r[" + std::to_string(k) + "]";
    shape(dn, direct_cov[k], M, M);
    shape(rn, ris_cov[k], N, N);
    linalg::require_hermitian_psd(dn, direct_cov[k]);
    linalg::require_hermitian_psd(rn, ris_cov[k]);
  }
  shape("T_bar", los, N, M);
  if (!los.allFinite()) throw InvariantViolation("T_bar has non-finite entries");
  shape("R_RIS", ris_corr, N, N);
  shape("R_Tx", tx_corr, M, M);
  linalg::require_hermitian_psd("R_RIS", ris_corr);
  linalg::require_hermitian_psd("R_Tx", tx_corr);
}

ChannelStatistics ChannelStatistics::without_ris() const {
  ChannelStatistics out;
  out.dims = {dims.M, dims.K, 0};
  out.direct_cov = direct_cov;
  out.ris_cov.assign(dims.K, Mat(0, 0));
  out.los = Mat(0, dims.M);
  out.ris_corr = Mat(0, 0);
  out.tx_corr = tx_corr;
  out.delta = delta;
  return out;
}

StatisticsRoots::StatisticsRoots(const ChannelStatistics& stats) {
  const int K = stats.dims.K;
  direct_root.reserve(K);
  ris_root.reserve(K);
  hadamard.reserve(K);
  hadamard_root.reserve(K);
  for (int k = 0; k < K; ++k) {
    direct_root.push_back(linalg::hermitian_sqrt(stats.direct_cov[k]));
    ris_root.push_back(linalg::hermitian_sqrt(stats.ris_cov[k]));
    hadamard.push_back(hadamard_with_transpose(stats.ris_corr, stats.ris_cov[k]));
    hadamard_root.push_back(linalg::hermitian_sqrt(hadamard.back()));
  }
  ris_corr_root = linalg::hermitian_sqrt(stats.ris_corr);
  tx_corr_root = linalg::hermitian_sqrt(stats.tx_corr);
}

PhaseConfiguration::PhaseConfiguration(Vec phi) : phi_(std::move(phi)) {
  for (Eigen::Index n = 0; n < phi_.size(); ++n) {
    if (!(std::abs(std::abs(phi_(n)) - 1.0) <= 1e-12))
      throw InvalidArgument("phase entry " + std::to_string(n) + " is not unit-modulus");
  }
}

PhaseConfiguration PhaseConfiguration::ones(int n) { return PhaseConfiguration(Vec::Ones(n)); }

PhaseConfiguration PhaseConfiguration::random(int n, RandomStream& rng) {
  Vec phi(n);
  for (int i = 0; i < n; ++i) phi(i) = std::polar(1.0, rng.uniform(-std::numbers::pi, std::numbers::pi));
  return PhaseConfiguration(std::move(phi));
}

Vec PhaseConfiguration::augmented() const {
  Vec out(phi_.size() + 1);
  out.head(phi_.size()) = phi_;
  out(phi_.size()) = 1.0;
  return out;
}

Mat cascade_matrix(const ChannelRealization& ch, int k) {
  const auto M = ch.direct[k].size();
  const auto N = ch.ris.empty() ? 0 : ch.ris[k].size();
  Mat z(M, N + 1);
  if (N > 0) z.leftCols(N) = ch.bs_ris.adjoint() * ch.ris[k].asDiagonal();
  z.col(N) = ch.direct[k];
  return z;
}

void ScenarioConfig::validate() const {
  dims.validate();
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in [0, 1]");
  require(static_cast<int>(users.size()) == dims.K, "scenario lists " + std::to_string(users.size()) +
                                                        " users but K = " + std::to_string(dims.K));
  auto check_paths = [](const std::vector<PathSpec>& paths, const std::string& what) {
    for (const auto& p : paths) {
      require(p.power > 0.0, what + " path power must be positive");
      require(p.spread_deg >= 0.0, what + " angular spread must be non-negative");
    }
  };
  for (const auto& u : users) {
    require(!u.direct.empty(), "every user needs at least one direct path");
    check_paths(u.direct, "direct");
    check_paths(u.ris, "RIS");
  }
  require(direct_gain >= 0.0 && ris_gain >= 0.0 && bs_ris_gain >= 0.0, "gains must be non-negative");
  require(tx_spread_deg >= 0.0 && ris_spread_deg >= 0.0, "spreads must be non-negative");
  require(angle_jitter_deg >= 0.0, "angle_jitter_deg must be non-negative");
  require(power_scale_min > 0.0 && power_scale_max >= power_scale_min, "invalid power scale range");
}

Vec steering_vector(int n, double angle_rad) {
  Vec a(n);
  const double s = std::sin(angle_rad);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) a(m) = std::polar(norm, std::numbers::pi * m * s);
  return a;
}

Mat angular_covariance(int n, double angle_rad, double spread_rad) {
  if (n == 0) return Mat(0, 0);
  if (spread_rad <= 0.0) {
    Vec a = steering_vector(n, angle_rad);
    return a * a.adjoint();
  }
  // Midpoint rule on each side of the cusp at the center.
  const double half_width = std::min(std::numbers::pi, 12.0 * spread_rad);
  const double h = half_width / kQuadraturePointsPerSide;
  const double rate = std::sqrt(2.0) / spread_rad;
  Mat acc = Mat::Zero(n, n);
  double wsum = 0.0;
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i < kQuadraturePointsPerSide; ++i) {
      const double off = (i + 0.5) * h;
      const double w = std::exp(-rate * off);
      Vec a = steering_vector(n, angle_rad + side * off);
      acc.noalias() += w * (a * a.adjoint());
      wsum += w;
    }
  }
  acc /= wsum;
  return linalg::hermitian_part(acc);
}

ChannelStatistics synthesize_covariances(const ScenarioConfig& scenario, RandomStream& rng) {
  scenario.validate();
  const auto [M, K, N] = scenario.dims;
  ChannelStatistics s;
  s.dims = scenario.dims;
  s.delta = scenario.delta;

  auto link_cov = [&](int n, const std::vector<PathSpec>& paths, double gain) {
    Mat c = Mat::Zero(n, n);
    for (const auto& p : paths) {
      const double angle = (p.angle_deg + rng.uniform(-1.0, 1.0) * scenario.angle_jitter_deg) * kDeg;
      const double power = p.power * rng.uniform(scenario.power_scale_min, scenario.power_scale_max);
      c += power * angular_covariance(n, angle, p.spread_deg * kDeg);
    }
    return Mat(gain * c);
  };

  for (int k = 0; k < K; ++k) {
    const auto& u = scenario.users[k];
    s.direct_cov.push_back(link_cov(M, u.direct, scenario.direct_gain));
    s.ris_cov.push_back(N > 0 ? link_cov(N, u.ris, scenario.ris_gain) : Mat(0, 0));
  }

  const double aod = scenario.bs_ris_aod_deg * kDeg;
  const double aoa = scenario.bs_ris_aoa_deg * kDeg;
  s.tx_corr = static_cast<double>(M) * angular_covariance(M, aod, scenario.tx_spread_deg * kDeg);
  if (N > 0) {
    s.ris_corr = scenario.bs_ris_gain * static_cast<double>(N) *
                 angular_covariance(N, aoa, scenario.ris_spread_deg * kDeg);
    const Vec a_ris = std::sqrt(static_cast<double>(N)) * steering_vector(N, aoa);
    const Vec a_bs = std::sqrt(static_cast<double>(M)) * steering_vector(M, aod);
    s.los = std::sqrt(1.0 - scenario.delta) * std::sqrt(scenario.bs_ris_gain) * (a_ris * a_bs.adjoint());
  } else {
    s.ris_corr = Mat(0, 0);
    s.los = Mat(0, M);
  }
  return s;
}

Mat effective_covariance(const ChannelStatistics& stats, const PhaseConfiguration& phi, int k) {
  const auto N = stats.dims.N;
  if (k < 0 || k >= stats.dims.K) throw InvalidArgument("user index out of range");
  if (phi.size() != N) throw InvalidArgument("phase vector length does not match N");
  Mat c = stats.direct_cov[k];
  if (N > 0) {
    const Vec& p = phi.phi();
    // Phi^H T_bar scales row n by conj(phi_n).
    Mat y = p.conjugate().asDiagonal() * stats.los;
    c += y.adjoint() * stats.ris_cov[k] * y;
    if (stats.delta > 0.0) {
      Mat x = hadamard_with_transpose(stats.ris_corr, stats.ris_cov[k]);
      const double q = linalg::quad_form(x, p);
      c += stats.delta * q * stats.tx_corr;
    }
  }
  return linalg::hermitian_part(c);
}

CovarianceWithRoot effective_covariance_with_root(const ChannelStatistics& stats, const PhaseConfiguration& phi,
                                                  int k) {
  CovarianceWithRoot out;
  out.cov = effective_covariance(stats, phi, k);
  out.root = linalg::hermitian_sqrt(out.cov);
  return out;
}

ChannelSampler::ChannelSampler(const ChannelStatistics& stats) : stats_(stats), roots_(stats) {}

ChannelRealization ChannelSampler::draw(const PhaseConfiguration& phi, RandomStream& rng) const {
  const auto [M, K, N] = stats_.dims;
  if (phi.size() != N) throw InvalidArgument("phase vector length does not match N");
  ChannelRealization ch;
  ch.direct.reserve(K);
  ch.ris.reserve(K);
  for (int k = 0; k < K; ++k) ch.direct.push_back(roots_.direct_root[k] * rng.complex_normal_vector(M));
  for (int k = 0; k < K; ++k) ch.ris.push_back(roots_.ris_root[k] * rng.complex_normal_vector(N));
  ch.bs_ris = stats_.los;
  if (N > 0 && stats_.delta > 0.0) {
    Mat w(N, M);
    for (int n = 0; n < N; ++n)
      for (int m = 0; m < M; ++m) w(n, m) = rng.complex_normal();
    ch.bs_ris += std::sqrt(stats_.delta) * roots_.ris_corr_root * w * roots_.tx_corr_root;
  }
  apply_phases(ch, phi);
  return ch;
}

void apply_phases(ChannelRealization& ch, const PhaseConfiguration& phi) {
  const auto K = ch.direct.size();
  ch.effective.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (phi.size() == 0) {
      ch.effective[k] = ch.direct[k];
    } else {
      ch.effective[k] = ch.direct[k] + ch.bs_ris.adjoint() * phi.phi().cwiseProduct(ch.ris[k]);
    }
  }
}

ChannelRealization sample_channels(const ChannelStatistics& stats, const PhaseConfiguration& phi, RandomStream& rng) {
  return ChannelSampler(stats).draw(phi, rng);
}

}  // namespace rsris::model
