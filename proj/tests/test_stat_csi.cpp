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
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "linalg.hpp"
#include "power_iteration.hpp"
#include "stat_csi_optimizer.hpp"
#include "support/stat_oracles.hpp"
#include "support/test_util.hpp"

using namespace rsris;
using namespace rsris::statcsi;
using rsris::testing::random_precoders;
using rsris::testing::random_psd;
using rsris::testing::random_statistics;

namespace {

struct Instance {
  ChannelStatistics stats;
  PhaseConfiguration phi;
  CovarianceSet cov;
  std::vector<fp::UserQuadratic> users;
  PrecoderSet p;
  double pt = 0.0;
};

Instance random_instance(int M, int K, int N, RandomStream& rng, bool common = true) {
  Instance in;
  in.stats = random_statistics(M, K, N, rng.uniform(0.1, 0.9), rng);
  in.phi = PhaseConfiguration::random(N, rng);
  in.cov = effective_covariances(in.stats, in.phi);
  in.users = user_models(in.cov);
  in.pt = std::pow(10.0, rng.uniform(0.0, 2.0));
  in.p = random_precoders(M, K, in.pt, rng, common);
  return in;
}

double log_rate(const Instance& in, const PrecoderSet& p, int k, bool rs = true) {
  const auto ref = testing::reference_approx_sinrs(in.cov.cov, p);
  double r = 0.0;
  for (double g : ref.priv) r += std::log1p(g);
  if (rs) r += std::log1p(ref.common[k]);
  return r;
}

Vec random_phi_bar(int N, RandomStream& rng) {
  Vec x(N + 1);
  x.head(N) = PhaseConfiguration::random(N, rng).phi();
  x(N) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("auxiliary updates: closed-form cases") {
  const double pt = 5.0;
  SUBCASE("single user, identity covariance") {
    CovarianceSet c{{Mat::Identity(2, 2)}, {Mat::Identity(2, 2)}};
    PrecoderSet p(2, 1);
    p.priv[0](0) = std::sqrt(pt);
    fp::Auxiliaries aux;
    update_lambdas(c.cov, p, aux);
    CHECK(aux.lambda[0] == doctest::Approx(pt));
    CHECK(aux.lambda_c[0] == 0.0);
  }
  SUBCASE("scalar beta") {
    CovarianceSet c{{Mat::Identity(1, 1)}, {Mat::Identity(1, 1)}};
    PrecoderSet p(1, 1);
    p.priv[0](0) = std::sqrt(pt);
    fp::Auxiliaries aux;
    update_lambdas(c.cov, p, aux);
    update_betas(c, p, aux);
    CHECK(std::abs(aux.beta[0](0) - std::sqrt(pt / (1.0 + pt))) < 1e-14);
    CHECK(aux.beta_c[0].norm() == 0.0);
  }
  SUBCASE("zero private precoder gives zero beta") {
    RandomStream rng(1);
    auto in = random_instance(3, 2, 3, rng);
    in.p.priv[1].setZero();
    fp::Auxiliaries aux;
    update_lambdas(in.cov.cov, in.p, aux);
    update_betas(in.cov, in.p, aux);
    CHECK(aux.beta[1].norm() == 0.0);
    CHECK(aux.lambda[1] == 0.0);
  }
  SUBCASE("all-zero state evaluates to zero") {
    RandomStream rng(2);
    auto in = random_instance(3, 2, 3, rng);
    fp::Auxiliaries aux;
    aux.lambda.assign(2, 0.0);
    aux.lambda_c.assign(2, 0.0);
    aux.beta.assign(2, Vec::Zero(3));
    aux.beta_c.assign(2, Vec::Zero(3));
    CHECK(fp_objective(in.cov, PrecoderSet(3, 2), aux, 0) == 0.0);
  }
}

TEST_CASE("the tight objective equals the covariance log-rate") {
  RandomStream rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = random_instance(1 + trial % 6, 1 + trial % 4, trial % 5, rng);
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    for (int k = 0; k < in.stats.dims.K; ++k) {
      const double expected = log_rate(in, in.p, k);
      CHECK(std::abs(fp_objective(in.cov, in.p, aux, k) - expected) < 1e-9 * std::max(1.0, expected));
      CHECK(std::abs(fp::fp_objective(in.users, in.p, aux, k, false) - log_rate(in, in.p, k, false)) < 1e-9);
    }
  }
}

TEST_CASE("tight auxiliaries are local maximizers of the objective") {
  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(2 + trial % 3, 1 + trial % 3, 3, rng);
    const int K = in.stats.dims.K;
    const auto tight = fp::tight_auxiliaries(in.users, in.p);
    const int k = trial % K;
    const double f0 = fp_objective(in.cov, in.p, tight, k);

    // lambda +/- 1e-3 with the matching beta re-derived.
    for (double step : {-1e-3, 1e-3}) {
      auto aux = tight;
      aux.lambda[0] = std::max(0.0, aux.lambda[0] + step);
      fp::update_betas(in.users, in.p, aux);
      CHECK(fp_objective(in.cov, in.p, aux, k) <= f0 + 1e-12);
    }
    // Perturbing beta strictly lowers the value (the objective is strictly concave in beta).
    auto aux = tight;
    aux.beta[0] += 1e-2 * rng.complex_normal_vector(aux.beta[0].size());
    CHECK(fp_objective(in.cov, in.p, aux, k) < f0);

    // Starting from arbitrary auxiliaries, the lambda/beta pair never lowers the value.
    fp::Auxiliaries loose;
    for (int i = 0; i < K; ++i) {
      loose.lambda.push_back(rng.uniform(0.0, 3.0));
      loose.lambda_c.push_back(rng.uniform(0.0, 3.0));
      loose.beta.push_back(rng.complex_normal_vector(in.stats.dims.M));
      loose.beta_c.push_back(rng.complex_normal_vector(in.stats.dims.M));
    }
    const double before = fp_objective(in.cov, in.p, loose, k);
    update_lambdas(in.cov.cov, in.p, loose);
    update_betas(in.cov, in.p, loose);
    CHECK(fp_objective(in.cov, in.p, loose, k) >= before - 1e-12);
  }
}

TEST_CASE("precoder system matches a polarization oracle") {
  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const bool rs = trial % 4 != 3;
    const auto in = random_instance(1 + trial % 3, 1 + trial % 3, 2, rng, rs);
    const int M = in.stats.dims.M, K = in.stats.dims.K;
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    const auto n = static_cast<Eigen::Index>(K + 1) * M;
    for (int k = 0; k < (rs ? K : 1); ++k) {
      const auto sys = fp::assemble_precoder_system(in.users, aux, k, in.pt, rs);
      const auto ref = testing::polarize([&](const Vec& v) { return testing::rescaled_objective(in.cov, in.pt, aux, k, rs, v); }, n);
      const double scale = std::max(1.0, ref.A.norm());
      CHECK((sys.A - ref.A).norm() <= 1e-9 * scale);
      CHECK((sys.b - ref.b).norm() <= 1e-9 * std::max(1.0, ref.b.norm()));

      Eigen::SelfAdjointEigenSolver<Mat> es(sys.A);
      CHECK(es.eigenvalues().minCoeff() > 0.0);

      const Vec v = sys.A.llt().solve(sys.b);
      CHECK((ref.A * v - ref.b).norm() <= 1e-8 * std::max(ref.b.norm(), 1e-300));
      const Vec x = rng.complex_normal_vector(n);
      CHECK(std::abs(sys.value(x) - testing::rescaled_objective(in.cov, in.pt, aux, k, rs, x)) < 1e-9 * std::max(1.0, std::abs(sys.value(x))));
    }
  }
}

TEST_CASE("scalar precoder system matches a hand expansion") {
  // M = 1, K = 1, C = c: blocks decouple into two scalar equations.
  const double c = 1.7, pt = 3.0;
  const CovarianceSet cov{{Mat::Constant(1, 1, c)}, {Mat::Constant(1, 1, std::sqrt(c))}};
  const auto users = user_models(cov);
  PrecoderSet p(1, 1);
  p.common(0) = cd(0.8, 0.3);
  p.priv[0](0) = cd(-0.4, 1.1);
  const auto aux = fp::tight_auxiliaries(users, p);
  const double bc2 = std::norm(aux.beta_c[0](0)), b12 = std::norm(aux.beta[0](0));
  const double w = (bc2 + b12) / pt;
  const double a_c = bc2 * c + w;
  const double a_1 = (b12 + bc2) * c + w;
  const cd rhs_c = std::sqrt(1.0 + aux.lambda_c[0]) * std::sqrt(c) * aux.beta_c[0](0);
  const cd rhs_1 = std::sqrt(1.0 + aux.lambda[0]) * std::sqrt(c) * aux.beta[0](0);
  const auto sys = fp::assemble_precoder_system(users, aux, 0, pt, true);
  const Vec v = sys.A.llt().solve(sys.b);
  CHECK(std::abs(v(0) - rhs_c / a_c) < 1e-12);
  CHECK(std::abs(v(1) - rhs_1 / a_1) < 1e-12);
  CHECK(std::abs(sys.A(0, 1)) == 0.0);
}

TEST_CASE("precoder update meets the power budget and selects the smallest candidate") {
  RandomStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(2 + trial % 4, 1 + trial % 4, 3, rng);
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    const auto upd = fp::update_precoders(in.users, aux, in.pt, true);
    CHECK(std::abs(upd.precoders.power() - in.pt) < 1e-9 * in.pt);
    for (double v : upd.candidate_value) CHECK(upd.candidate_value[upd.k_opt] <= v);
    const auto nors = fp::update_precoders(in.users, aux, in.pt, false);
    CHECK(nors.precoders.common.norm() == 0.0);
    CHECK(std::abs(nors.precoders.power() - in.pt) < 1e-9 * in.pt);
  }
}

TEST_CASE("all-zero precoders are a degenerate state") {
  RandomStream rng(7);
  const auto in = random_instance(3, 2, 2, rng);
  const PrecoderSet zero(3, 2);
  const auto aux = fp::tight_auxiliaries(in.users, zero);
  CHECK_THROWS_AS(fp::update_precoders(in.users, aux, in.pt, true), DegenerateState);
}

TEST_CASE("phase auxiliaries decompose the received power") {
  RandomStream rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    auto in = random_instance(2 + trial % 3, 1 + trial % 3, 2 + trial % 6, rng);
    if (trial % 5 == 0) {
      in.stats.delta = 0.0;
      in.cov = effective_covariances(in.stats, in.phi);
      in.users = user_models(in.cov);
    }
    const StatisticsRoots roots(in.stats);
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    const auto pa = refresh_phase_auxiliaries(in.stats, roots, in.phi, in.p, aux.lambda, aux.lambda_c);
    for (int k = 0; k < in.stats.dims.K; ++k) {
      double parts = 0.0, parts_c = 0.0, a = 0.0;
      for (int m = 0; m < 3; ++m) {
        parts += pa.x[k][m].squaredNorm();
        parts_c += pa.x_c[k][m].squaredNorm();
        a += pa.beta_m[k][m].squaredNorm();
      }
      const double q = testing::quad(in.cov.cov[k], in.p.priv[k]);
      const double qc = testing::quad(in.cov.cov[k], in.p.common);
      CHECK(std::abs(parts - q) < 1e-9 * std::max(1.0, q));
      CHECK(std::abs(parts_c - qc) < 1e-9 * std::max(1.0, qc));
      CHECK(std::abs(a - pa.a[k]) < 1e-12 * std::max(1.0, a));
      if (in.stats.delta == 0.0) {
        CHECK(pa.l[k] == 0.0);
        CHECK(pa.x[k][2].norm() == 0.0);
        CHECK(pa.beta_m[k][2].norm() == 0.0);
      }
    }
  }
  SUBCASE("zero private precoder") {
    auto in = random_instance(3, 2, 4, rng);
    in.p.priv[0].setZero();
    const StatisticsRoots roots(in.stats);
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    const auto pa = refresh_phase_auxiliaries(in.stats, roots, in.phi, in.p, aux.lambda, aux.lambda_c);
    for (int m = 0; m < 3; ++m) {
      CHECK(pa.x[0][m].norm() == 0.0);
      CHECK(pa.beta_m[0][m].norm() == 0.0);
    }
  }
}

TEST_CASE("phase quadratic reproduces the objective") {
  RandomStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const bool rs = trial % 5 != 4;
    const int N = 1 + trial % 8;
    const auto in = random_instance(2 + trial % 3, 1 + trial % 3, N, rng, rs);
    const StatisticsRoots roots(in.stats);
    const auto aux = fp::tight_auxiliaries(in.users, in.p);
    const auto pa = refresh_phase_auxiliaries(in.stats, roots, in.phi, in.p, aux.lambda, aux.lambda_c);
    const auto q = build_phase_quadratic(in.stats, roots, in.p, aux.lambda, aux.lambda_c, pa, rs);
    const Vec anchor = in.phi.augmented();
    for (int k = 0; k < in.stats.dims.K; ++k) {
      const Mat h = q.B + q.B_c[k];
      CHECK(linalg::max_asymmetry(h) < 1e-10 * std::max(1.0, h.norm()));
      // At the anchor the surrogate is the tight objective, i.e. the log-rate.
      const double at_anchor = q.value(k, anchor);
      CHECK(std::abs(at_anchor - log_rate(in, in.p, k, rs)) < 1e-8 * std::max(1.0, std::abs(at_anchor)));
      for (int r = 0; r < 3; ++r) {
        const Vec x = random_phi_bar(N, rng);
        const double quad = q.value(k, x);
        const double direct = testing::reference_phase_surrogate(in.stats, x.head(N), in.p, aux, pa, k, rs);
        CHECK(std::abs(quad - direct) < 1e-8 * std::max(1.0, std::abs(direct)));
        const PhaseConfiguration phi_x(Vec(x.head(N)));
        CHECK(std::abs(quad - phase_surrogate(in.stats, roots, phi_x, in.p, aux.lambda, aux.lambda_c, pa, k, rs)) <
              1e-8 * std::max(1.0, std::abs(quad)));
        // The surrogate minorizes the log-rate.
        const auto cov_x = effective_covariances(in.stats, phi_x);
        const auto ref = testing::reference_approx_sinrs(cov_x.cov, in.p);
        double lr = 0.0;
        for (double g : ref.priv) lr += std::log1p(g);
        if (rs) lr += std::log1p(ref.common[k]);
        CHECK(quad <= lr + 1e-9 * std::max(1.0, lr));
      }
    }
  }
}

TEST_CASE("phase quadratic vanishes for zero precoders") {
  RandomStream rng(10);
  const auto in = random_instance(3, 2, 5, rng);
  const PrecoderSet zero(3, 2);
  const StatisticsRoots roots(in.stats);
  const std::vector<double> lam{0.0, 0.0};
  const auto pa = refresh_phase_auxiliaries(in.stats, roots, in.phi, zero, lam, lam);
  const auto q = build_phase_quadratic(in.stats, roots, zero, lam, lam, pa);
  CHECK(q.B.norm() == 0.0);
  for (const auto& b : q.B_c) CHECK(b.norm() == 0.0);
  const auto upd = fp::update_phases(q, in.phi, true);
  for (int n = 0; n < 5; ++n) CHECK(std::abs(std::abs(upd.phi.phi()(n)) - 1.0) < 1e-12);
}

TEST_CASE("bordered form of a homogeneous quadratic") {
  RandomStream rng(11);
  const int N = 4;
  const Mat r = random_psd(N + 1, rng);
  const Vec g = rng.complex_normal_vector(N + 1);
  const double t0 = 0.7;
  const auto bf = fp::bordered_from_homogeneous(r, g, t0);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = random_phi_bar(N, rng);
    const double direct = -testing::quad(r, x) + 2.0 * g.dot(x).real() + t0;
    CHECK(std::abs(testing::quad(bf.B, x) + bf.t - direct) < 1e-10);
  }
}

TEST_CASE("unit-modulus projection") {
  Vec x(4);
  x << cd(0.0, 2.0), cd(1e-14, 0.0), cd(-3.0, 0.0), cd(0.0, 0.5);
  const Vec y = fp::project_unit_modulus(x);
  CHECK(y(3) == cd(1.0, 0.0));
  CHECK(std::abs(y(0) - cd(1.0, 0.0)) < 1e-15);  // rotated by -90 degrees
  CHECK(y(1) == cd(1.0, 0.0));
  CHECK(std::abs(y(2) - cd(0.0, 1.0)) < 1e-15);
}

TEST_CASE("power iteration") {
  SUBCASE("diagonal") {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 1.0;
    const auto ep = eig::principal_eigenvector(h);
    CHECK(ep.value == doctest::Approx(2.0));
    CHECK(std::abs(ep.vector(0)) == doctest::Approx(1.0));
  }
  SUBCASE("identity") {
    const auto ep = eig::principal_eigenvector(Mat::Identity(5, 5));
    CHECK(ep.value == doctest::Approx(1.0));
    CHECK(ep.residual <= 1e-10 * std::sqrt(5.0));
    CHECK(ep.vector.norm() == doctest::Approx(1.0));
  }
  SUBCASE("indefinite matrices match a dense eigensolver") {
    RandomStream rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const Mat g = testing::random_matrix(41, 41, rng);
      const Mat h = 0.5 * (g + g.adjoint());
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const auto ep = eig::principal_eigenvector(h, 1e-12, 200000);
      CHECK(std::abs(es.eigenvectors().col(40).dot(ep.vector)) >= 1.0 - 1e-8);
      CHECK(ep.value == doctest::Approx(es.eigenvalues()(40)).epsilon(1e-9));
    }
  }
  SUBCASE("exhausted budget reports the residual") {
    RandomStream rng(13);
    const Mat g = testing::random_matrix(20, 20, rng);
    const Mat h = 0.5 * (g + g.adjoint());
    try {
      eig::principal_eigenvector(h, 1e-14, 1);
      FAIL("expected non-convergence");
    } catch (const NonConvergence& e) {
      CHECK(e.last_residual() > 0.0);
      CHECK(e.code() == ErrorCode::no_convergence);
    }
  }
}

TEST_CASE("phase update on two elements is close to the grid optimum") {
  RandomStream rng(14);
  const auto in = random_instance(3, 2, 2, rng);
  const StatisticsRoots roots(in.stats);
  const auto aux = fp::tight_auxiliaries(in.users, in.p);
  const auto pa = refresh_phase_auxiliaries(in.stats, roots, in.phi, in.p, aux.lambda, aux.lambda_c);
  const auto q = build_phase_quadratic(in.stats, roots, in.p, aux.lambda, aux.lambda_c, pa);
  const auto upd = fp::update_phases(q, in.phi, true);
  CHECK(upd.value == doctest::Approx(q.value(upd.k_opt, upd.phi.augmented())));
  for (double v : upd.candidate_value) CHECK(upd.value <= v);
  for (int n = 0; n < 2; ++n) CHECK(std::abs(std::abs(upd.phi.phi()(n)) - 1.0) < 1e-12);
}

TEST_CASE("optimizer invariants") {
  RandomStream rng(15);
  auto stats = random_statistics(3, 3, 6, 0.5, rng);
  fp::OptimizerConfig cfg;
  cfg.pt = 10.0;
  cfg.max_iters = 25;
  cfg.trace = true;

  SUBCASE("without RIS or rate splitting the objective trace never decreases") {
    cfg.rate_splitting = false;
    const auto sol = optimize(stats.without_ris(), cfg);
    for (std::size_t t = 1; t < sol.trace.size(); ++t)
      CHECK(sol.trace[t].fp_objective >= sol.trace[t - 1].fp_objective - 1e-9);
    CHECK(sol.precoders.common.norm() == 0.0);
  }
  SUBCASE("power equality, unit modulus, monotone core and the max-min bound") {
    const auto sol = optimize(stats, cfg);
    CHECK(std::abs(sol.precoders.power() - cfg.pt) < 1e-9 * cfg.pt);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(std::abs(sol.phi.phi()(n)) - 1.0) < 1e-12);
    for (const auto& rec : sol.trace) {
      CHECK(rec.core_after >= rec.core_before - 1e-9);
      CHECK(rec.phase_equivalence_error < 1e-8 * std::max(1.0, std::abs(rec.fp_objective)));
    }
    CHECK(static_cast<int>(sol.trace.size()) == sol.iterations_used);
    CHECK(sol.iterations_used <= cfg.max_iters);
    const StatCsiProblem problem(stats);
    const auto users = problem.user_models(sol.phi);
    const double inner = fp::log_rate_for_user(users, sol.precoders, sol.common_user, true) / std::log(2.0);
    CHECK(sol.rate.sum_rate <= inner + 1e-12);
    CHECK(sol.rate.sum_rate >= sol.initial_rate_bits - 1e-9);
  }
  SUBCASE("fixed inputs replay bit-identically") {
    const auto a = optimize(stats, cfg);
    const auto b = optimize(stats, cfg);
    CHECK(a.precoders.stacked() == b.precoders.stacked());
    CHECK(a.phi.phi() == b.phi.phi());
    CHECK(a.rate.sum_rate == b.rate.sum_rate);
  }
  SUBCASE("invalid configurations are rejected") {
    cfg.pt = 0.0;
    CHECK_THROWS_AS(optimize(stats, cfg), InvalidArgument);
    cfg.pt = 1.0;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(optimize(stats, cfg), InvalidArgument);
    cfg.max_iters = 5;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(optimize(stats, cfg), InvalidArgument);
  }
  SUBCASE("a power-iteration budget of one sweep surfaces as non-convergence") {
    cfg.power_iteration.max_iters = 1;
    CHECK_THROWS_AS(optimize(stats, cfg), NonConvergence);
  }
}
