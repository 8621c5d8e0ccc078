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

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "core_model.hpp"
#include "linalg.hpp"
#include "stats_io.hpp"
#include "support/test_util.hpp"

using namespace rsris;
using namespace rsris::model;
using rsris::testing::random_psd;
using rsris::testing::random_statistics;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ScenarioConfig one_user_scenario(int M, int N) {
  ScenarioConfig s;
  s.dims = {M, 1, N};
  s.users.resize(1);
  s.users[0].direct = {{10.0, 0.0, 1.0}};
  s.users[0].ris = {{-20.0, 5.0, 1.0}};
  return s;
}

}  // namespace

TEST_CASE("system dimensions are validated") {
  CHECK_NOTHROW(SystemDims{1, 1, 0}.validate());
  CHECK_THROWS_AS(SystemDims({0, 1, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SystemDims({1, 0, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SystemDims({1, 1, -1}).validate(), InvalidArgument);
}

TEST_CASE("phase configurations are unit modulus") {
  RandomStream rng(3);
  const auto phi = PhaseConfiguration::random(16, rng);
  for (int n = 0; n < phi.size(); ++n) CHECK(std::abs(std::abs(phi.phi()(n)) - 1.0) < 1e-12);
  CHECK(phi.augmented().size() == 17);
  CHECK(phi.augmented()(16) == cd(1.0, 0.0));
  Vec bad = Vec::Ones(3);
  bad(1) = 1.001;
  CHECK_THROWS_AS(PhaseConfiguration{bad}, InvalidArgument);
}

TEST_CASE("hermitian square root squares back") {
  RandomStream rng(5);
  const Mat a = random_psd(6, rng, 3);
  const Mat r = linalg::hermitian_sqrt(a);
  CHECK((r * r - a).norm() < 1e-10 * a.norm());
  CHECK(linalg::max_asymmetry(r) < 1e-12);
  CHECK(linalg::min_eigenvalue(r) > -1e-10);
}

TEST_CASE("steering vectors have unit norm") {
  for (double deg : {-60.0, 0.0, 33.0}) CHECK(steering_vector(8, deg * kDeg).norm() == doctest::Approx(1.0));
}

TEST_CASE("zero angular spread gives a rank-one covariance") {
  auto sc = one_user_scenario(6, 0);
  sc.users[0].direct = {{25.0, 0.0, 2.5}};
  RandomStream rng(1);
  const auto stats = synthesize_covariances(sc, rng);
  const Vec a = steering_vector(6, 25.0 * kDeg);
  const Mat expected = 2.5 * a * a.adjoint();
  CHECK((stats.direct_cov[0] - expected).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(stats.direct_cov[0]);
  CHECK(es.eigenvalues()(4) < 1e-12);
}

TEST_CASE("delta = 1 removes the deterministic BS-RIS component") {
  auto sc = one_user_scenario(3, 4);
  sc.delta = 1.0;
  RandomStream rng(2);
  CHECK(synthesize_covariances(sc, rng).los.norm() == 0.0);
}

TEST_CASE("covariance trace equals the sum of path powers") {
  auto sc = one_user_scenario(8, 0);
  sc.users[0].direct = {{-30.0, 10.0, 0.7}, {5.0, 10.0, 1.1}, {40.0, 10.0, 0.4}};
  RandomStream rng(4);
  const auto stats = synthesize_covariances(sc, rng);
  CHECK(std::abs(linalg::real_trace(stats.direct_cov[0]) - 2.2) < 1e-9);
}

TEST_CASE("angular covariance agrees with an independent quadrature") {
  // Trapezoidal rule on a much finer grid over the whole circle.
  const int n = 6;
  const double center = 20.0 * kDeg;
  const double sigma = 10.0 * kDeg;
  const double b = sigma / std::sqrt(2.0);
  const int steps = 400000;
  Mat ref = Mat::Zero(n, n);
  double wsum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = -std::numbers::pi + 2.0 * std::numbers::pi * i / steps;
    const double w = std::exp(-std::abs(t) / b) * ((i == 0 || i == steps) ? 0.5 : 1.0);
    Vec a(n);
    for (int m = 0; m < n; ++m) a(m) = std::polar(1.0 / std::sqrt(double(n)), std::numbers::pi * m * std::sin(center + t));
    ref += w * a * a.adjoint();
    wsum += w;
  }
  ref /= wsum;
  const Mat got = angular_covariance(n, center, sigma);
  CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("invalid scenarios are rejected") {
  auto sc = one_user_scenario(2, 2);
  sc.delta = 1.5;
  RandomStream rng(1);
  CHECK_THROWS_AS(synthesize_covariances(sc, rng), InvalidArgument);
  sc.delta = 0.5;
  sc.users[0].direct[0].power = 0.0;
  CHECK_THROWS_AS(synthesize_covariances(sc, rng), InvalidArgument);
  sc.users[0].direct[0].power = -1.0;
  CHECK_THROWS_AS(synthesize_covariances(sc, rng), InvalidArgument);
}

TEST_CASE("synthesized statistics satisfy all invariants and are reproducible") {
  ScenarioConfig sc;
  sc.dims = {4, 3, 12};
  sc.users.resize(3);
  for (int k = 0; k < 3; ++k) {
    sc.users[k].direct = {{-30.0 + 30.0 * k, 8.0, 1.0}};
    sc.users[k].ris = {{20.0 - 15.0 * k, 4.0, 0.5}, {k * 10.0, 12.0, 0.3}};
  }
  sc.angle_jitter_deg = 5.0;
  sc.power_scale_min = 0.5;
  sc.power_scale_max = 1.5;
  RandomStream a(11), b(11);
  const auto s1 = synthesize_covariances(sc, a);
  const auto s2 = synthesize_covariances(sc, b);
  CHECK_NOTHROW(s1.validate());
  CHECK(s1.direct_cov[2] == s2.direct_cov[2]);
  CHECK(s1.ris_cov[1] == s2.ris_cov[1]);
}

TEST_CASE("effective covariance special cases") {
  RandomStream rng(8);
  SUBCASE("absent RIS-user link leaves the direct covariance") {
    auto s = random_statistics(3, 2, 4, 0.4, rng);
    s.ris_cov[1].setZero();
    const auto phi = PhaseConfiguration::random(4, rng);
    CHECK((effective_covariance(s, phi, 1) - s.direct_cov[1]).norm() < 1e-14);
  }
  SUBCASE("scalar case: the phase cancels") {
    ChannelStatistics s;
    s.dims = {1, 1, 1};
    s.delta = 0.0;
    s.direct_cov = {Mat::Constant(1, 1, 0.7)};
    s.ris_cov = {Mat::Constant(1, 1, 1.9)};
    s.los = Mat::Constant(1, 1, cd(0.3, -1.2));
    s.ris_corr = Mat::Constant(1, 1, 1.0);
    s.tx_corr = Mat::Constant(1, 1, 1.0);
    for (double theta : {0.0, 1.0, 2.5}) {
      const PhaseConfiguration phi(Vec::Constant(1, std::polar(1.0, theta)));
      CHECK(effective_covariance(s, phi, 0)(0, 0).real() == doctest::Approx(0.7 + std::norm(cd(0.3, -1.2)) * 1.9));
    }
  }
  SUBCASE("N = 0 gives the direct covariance") {
    auto s = random_statistics(3, 2, 4, 0.4, rng).without_ris();
    CHECK((effective_covariance(s, PhaseConfiguration::ones(0), 0) - s.direct_cov[0]).norm() == 0.0);
  }
}

TEST_CASE("effective covariance matches an entrywise reference and is Hermitian PSD") {
  RandomStream rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int M = 2 + trial % 3;
    const int N = 2 + trial % 5;
    const auto s = random_statistics(M, 2, N, 0.3 + 0.05 * trial, rng);
    const auto phi = PhaseConfiguration::random(N, rng);
    for (int k = 0; k < 2; ++k) {
      const Mat c = effective_covariance(s, phi, k);
      const Mat ref = testing::reference_effective_covariance(s, phi.phi(), k);
      CHECK((c - ref).norm() < 1e-10 * ref.norm());
      CHECK(linalg::max_asymmetry(c) < 1e-10);
      CHECK(linalg::min_eigenvalue(c) >= -1e-10 * linalg::real_trace(c));
      const auto cr = effective_covariance_with_root(s, phi, k);
      CHECK((cr.root * cr.root - cr.cov).norm() < 1e-9 * cr.cov.norm());
    }
  }
}

TEST_CASE("the NLoS term is invariant to a global phase rotation") {
  RandomStream rng(13);
  auto s = random_statistics(3, 1, 5, 1.0, rng);  // delta = 1: only the NLoS term depends on phi
  const auto phi = PhaseConfiguration::random(5, rng);
  const PhaseConfiguration rotated(phi.phi() * std::polar(1.0, 0.83));
  CHECK((effective_covariance(s, phi, 0) - effective_covariance(s, rotated, 0)).norm() < 1e-12);
}

TEST_CASE("sample covariance of effective channels matches the closed form") {
  RandomStream rng(99);
  const auto s = random_statistics(2, 1, 3, 0.5, rng);
  const auto phi = PhaseConfiguration::random(3, rng);
  const ChannelSampler sampler(s);
  const int n = 200000;
  Mat sum = Mat::Zero(2, 2);
  Eigen::MatrixXd sq_re = Eigen::MatrixXd::Zero(2, 2), sq_im = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vec h = sampler.draw(phi, rng).effective[0];
    const Mat o = h * h.adjoint();
    sum += o;
    sq_re += o.real().cwiseAbs2();
    sq_im += o.imag().cwiseAbs2();
  }
  const Mat mean = sum / n;
  const Mat c = effective_covariance(s, phi, 0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double se_re = std::sqrt((sq_re(a, b) / n - std::pow(mean(a, b).real(), 2)) / n);
      const double se_im = std::sqrt(std::max(1e-30, (sq_im(a, b) / n - std::pow(mean(a, b).imag(), 2)) / n));
      CHECK(std::abs(mean(a, b).real() - c(a, b).real()) <= 3.0 * se_re);
      CHECK(std::abs(mean(a, b).imag() - c(a, b).imag()) <= 3.0 * se_im + 1e-15);
    }
}

TEST_CASE("channel sampling") {
  RandomStream rng(17);
  SUBCASE("delta = 0 makes T deterministic") {
    auto s = random_statistics(3, 2, 4, 0.0, rng);
    const auto ch = sample_channels(s, PhaseConfiguration::ones(4), rng);
    CHECK((ch.bs_ris - s.los).norm() == 0.0);
  }
  SUBCASE("identity direct covariance: mean squared norm equals M") {
    ChannelStatistics s;
    s.dims = {4, 1, 0};
    s.direct_cov = {Mat::Identity(4, 4)};
    s.ris_cov = {Mat(0, 0)};
    s.los = Mat(0, 4);
    s.ris_corr = Mat(0, 0);
    s.tx_corr = Mat::Identity(4, 4);
    const ChannelSampler sampler(s);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = sampler.draw(PhaseConfiguration::ones(0), rng).direct[0].squaredNorm();
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 4.0) <= 3.0 * se);
  }
  SUBCASE("N = 0: effective channel is the direct channel") {
    const auto s = random_statistics(3, 2, 4, 0.5, rng).without_ris();
    const auto ch = sample_channels(s, PhaseConfiguration::ones(0), rng);
    for (int k = 0; k < 2; ++k) CHECK((ch.effective[k] - ch.direct[k]).norm() == 0.0);
  }
  SUBCASE("effective channel composition and cascade form") {
    const auto s = random_statistics(3, 2, 5, 0.5, rng);
    const auto phi = PhaseConfiguration::random(5, rng);
    auto ch = sample_channels(s, phi, rng);
    for (int k = 0; k < 2; ++k) {
      const Vec h = ch.direct[k] + ch.bs_ris.adjoint() * phi.phi().asDiagonal() * ch.ris[k];
      CHECK((ch.effective[k] - h).norm() < 1e-12);
      CHECK((cascade_matrix(ch, k) * phi.augmented() - h).norm() < 1e-12);
    }
    const auto phi2 = PhaseConfiguration::random(5, rng);
    apply_phases(ch, phi2);
    CHECK((ch.effective[0] - cascade_matrix(ch, 0) * phi2.augmented()).norm() < 1e-12);
  }
  SUBCASE("identical seeds replay bit-identically") {
    const auto s = random_statistics(3, 2, 5, 0.5, rng);
    const auto phi = PhaseConfiguration::random(5, rng);
    RandomStream a(123), b(123);
    const auto c1 = sample_channels(s, phi, a);
    const auto c2 = sample_channels(s, phi, b);
    CHECK(c1.bs_ris == c2.bs_ris);
    CHECK(c1.effective[1] == c2.effective[1]);
  }
}

TEST_CASE("statistics validation names the offending matrix") {
  RandomStream rng(31);
  auto s = random_statistics(3, 2, 4, 0.5, rng);
  CHECK_NOTHROW(s.validate());
  SUBCASE("non-Hermitian") {
    s.direct_cov[1](0, 2) += cd(0.25, 0.0);
    try {
      s.validate();
      FAIL("expected an invariant violation");
    } catch (const InvariantViolation& e) {
      const std::string msg = e.what();
      CHECK(msg.find("C_d[1]") != std::string::npos);
      CHECK(msg.find("asymmetry") != std::string::npos);
      CHECK(msg.find("0.25") != std::string::npos);
    }
  }
  SUBCASE("indefinite") {
    s.tx_corr = -Mat::Identity(3, 3);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("R_Tx"), InvariantViolation);
  }
  SUBCASE("dimension mismatch") {
    s.ris_cov[0] = Mat::Identity(3, 3);
    CHECK_THROWS_AS(s.validate(), InvariantViolation);
  }
  SUBCASE("delta out of range") {
    s.delta = -0.1;
    CHECK_THROWS(s.validate());
  }
}

TEST_CASE("statistics files round-trip exactly") {
  RandomStream rng(41);
  const auto s = random_statistics(3, 2, 4, 0.35, rng);
  const auto file = io::statistics_to_file(s);
  std::stringstream ss;
  io::write_matrix_file(ss, file);
  const auto back = io::statistics_from_file(io::parse_matrix_file(ss));
  CHECK(back.dims == s.dims);
  CHECK(back.delta == s.delta);
  CHECK(back.direct_cov[1] == s.direct_cov[1]);
  CHECK(back.ris_cov[0] == s.ris_cov[0]);
  CHECK(back.los == s.los);
  CHECK(back.ris_corr == s.ris_corr);
  CHECK(back.tx_corr == s.tx_corr);
}

TEST_CASE("malformed matrix files raise parse errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return io::parse_matrix_file(in);
  };
  try {
    parse("not-a-header\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
  }
  try {
    parse("rsris-matrices 1\ndims 1 1 0\nmatrix C_d[0] 1 1\n1.0\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
  }
}
