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

#include "rate_model.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"

namespace rsris::rate {

namespace {

void require_users(std::size_t n, const PrecoderSet& p) {
  if (static_cast<int>(n) != p.users()) throw InvalidArgument("user count does not match precoder set");
}

}  // namespace

double PrecoderSet::power() const {
  double s = common.squaredNorm();
  for (const auto& v : priv) s += v.squaredNorm();
  return s;
}

Vec PrecoderSet::stacked() const {
  const int M = antennas();
  Vec v(static_cast<Eigen::Index>(users() + 1) * M);
  v.segment(0, M) = common;
  for (int i = 0; i < users(); ++i) v.segment(static_cast<Eigen::Index>(i + 1) * M, M) = priv[i];
  return v;
}

PrecoderSet PrecoderSet::from_stacked(const Vec& v, int M, int K) {
  if (v.size() != static_cast<Eigen::Index>(K + 1) * M) throw InvalidArgument("stacked precoder has wrong length");
  PrecoderSet p(M, K);
  p.common = v.segment(0, M);
  for (int i = 0; i < K; ++i) p.priv[i] = v.segment(static_cast<Eigen::Index>(i + 1) * M, M);
  return p;
}

RateReport report_from_sinrs(const SinrSet& s) {
  RateReport r;
  const auto K = s.priv.size();
  r.private_rate.resize(K);
  r.common_rate_candidate.resize(K);
  double sum = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    r.private_rate[i] = std::log2(1.0 + s.priv[i]);
    r.common_rate_candidate[i] = std::log2(1.0 + s.common[i]);
    sum += r.private_rate[i];
  }
  if (K > 0) {
    auto it = std::min_element(r.common_rate_candidate.begin(), r.common_rate_candidate.end());
    r.common_user = static_cast<int>(it - r.common_rate_candidate.begin());
    sum += *it;
  }
  r.sum_rate = sum;
  return r;
}

SinrSet approx_sinrs(std::span<const Mat> cov, const PrecoderSet& p) {
  require_users(cov.size(), p);
  const int K = p.users();
  SinrSet s;
  s.priv.resize(K);
  s.common.resize(K);
  for (int k = 0; k < K; ++k) {
    const Mat& c = cov[k];
    double total_private = 0.0;
    double own = 0.0;
    for (int j = 0; j < K; ++j) {
      const double q = linalg::quad_form(c, p.priv[j]);
      total_private += q;
      if (j == k) own = q;
    }
    s.priv[k] = own / (total_private - own + 1.0);
    s.common[k] = linalg::quad_form(c, p.common) / (total_private + 1.0);
  }
  return s;
}

RateReport approx_sum_rate(std::span<const Mat> cov, const PrecoderSet& p) {
  return report_from_sinrs(approx_sinrs(cov, p));
}

SinrSet instantaneous_sinrs(std::span<const Vec> h, const PrecoderSet& p) {
  require_users(h.size(), p);
  const int K = p.users();
  SinrSet s;
  s.priv.resize(K);
  s.common.resize(K);
  for (int k = 0; k < K; ++k) {
    double total_private = 0.0;
    double own = 0.0;
    for (int j = 0; j < K; ++j) {
      const double g = std::norm(h[k].dot(p.priv[j]));
      total_private += g;
      if (j == k) own = g;
    }
    s.priv[k] = own / (total_private - own + 1.0);
    s.common[k] = std::norm(h[k].dot(p.common)) / (total_private + 1.0);
  }
  return s;
}

SinrSet imperfect_sinrs(const EstimationModel& est, const PrecoderSet& p) {
  require_users(est.estimate.size(), p);
  require_users(est.error_cov.size(), p);
  const int K = p.users();
  SinrSet s;
  s.priv.resize(K);
  s.common.resize(K);
  for (int k = 0; k < K; ++k) {
    const Vec& h = est.estimate[k];
    const Mat& e = est.error_cov[k];
    double err = 0.0, known = 0.0;
    for (int j = 0; j < K; ++j) {
      err += linalg::quad_form(e, p.priv[j]);
      known += std::norm(h.dot(p.priv[j]));
    }
    const double own = std::norm(h.dot(p.priv[k]));
    s.priv[k] = own / (err + (known - own) + 1.0);
    s.common[k] = std::norm(h.dot(p.common)) / (linalg::quad_form(e, p.common) + err + known + 1.0);
  }
  return s;
}

ErgodicAccumulator::ErgodicAccumulator(int users)
    : users_(users), private_user_sum_(users, 0.0), common_draws_(users) {}

void ErgodicAccumulator::add(const SinrSet& s) {
  double priv = 0.0;
  for (int i = 0; i < users_; ++i) {
    const double r = std::log2(1.0 + s.priv[i]);
    private_user_sum_[i] += r;
    priv += r;
  }
  private_draws_.push_back(priv);
  private_sum_ += priv;
  for (int k = 0; k < users_; ++k) common_draws_[k].push_back(std::log2(1.0 + s.common[k]));
  ++n_;
}

RateReport ErgodicAccumulator::report() const {
  RateReport r;
  if (n_ == 0) return r;
  const double n = n_;
  r.private_rate.resize(users_);
  r.common_rate_candidate.assign(users_, 0.0);
  for (int k = 0; k < users_; ++k) {
    r.private_rate[k] = private_user_sum_[k] / n;
    double acc = 0.0;
    for (double c : common_draws_[k]) acc += c;
    r.common_rate_candidate[k] = acc / n;
  }
  auto it = std::min_element(r.common_rate_candidate.begin(), r.common_rate_candidate.end());
  r.common_user = static_cast<int>(it - r.common_rate_candidate.begin());
  const double private_mean = private_sum_ / n;
  r.sum_rate = private_mean + *it;
  double var = 0.0;
  if (n_ > 1) {
    for (int t = 0; t < n_; ++t) {
      const double d = private_draws_[t] + common_draws_[r.common_user][t] - r.sum_rate;
      var += d * d;
    }
    var /= (n - 1.0);
  }
  r.std_error = std::sqrt(var / n);
  return r;
}

RateReport ergodic_sum_rate_mc(const model::ChannelSampler& sampler, const model::PhaseConfiguration& phi,
                               const PrecoderSet& p, int n_samples, RandomStream& rng) {
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  ErgodicAccumulator acc(p.users());
  for (int t = 0; t < n_samples; ++t) {
    const auto ch = sampler.draw(phi, rng);
    acc.add(instantaneous_sinrs(ch.effective, p));
  }
  return acc.report();
}

RateReport ergodic_sum_rate_mc(const model::ChannelStatistics& stats, const model::PhaseConfiguration& phi,
                               const PrecoderSet& p, int n_samples, RandomStream& rng) {
  return ergodic_sum_rate_mc(model::ChannelSampler(stats), phi, p, n_samples, rng);
}

}  // namespace rsris::rate
