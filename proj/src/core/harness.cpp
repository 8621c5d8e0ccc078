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

#include "harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stat_csi_optimizer.hpp"

namespace rsris::harness {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_double(double x) {
  std::ostringstream ss;
  ss.precision(10);
  ss << x;
  return ss.str();
}

struct CellOutcome {
  bool ok = false;
  double rate = 0.0;
  double iterations = 0.0;
  double seconds = 0.0;
  std::string reason;
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

CellOutcome run_cell(const ExperimentPlan& plan, const Variant& v, int t, int c) {
  using model::PhaseConfiguration;
  CellOutcome out;
  auto stats = plan_statistics(plan.scenario, plan.master_seed, c);
  if (v.ris == RisMode::none) stats = stats.without_ris();
  const int N = stats.dims.N;

  auto cfg = plan_optimizer_config(plan, plan.pt_grid_dB[t]);
  cfg.rate_splitting = v.rate_splitting;
  cfg.phase_update = v.ris == RisMode::optimized && N > 0;

  PhaseConfiguration phi0 = PhaseConfiguration::ones(N);
  if (v.ris == RisMode::random) {
    RandomStream prng(derive_seed(plan.master_seed, {2, static_cast<std::uint64_t>(c)}));
    phi0 = PhaseConfiguration::random(N, prng);
  }

  const auto ti = static_cast<std::uint64_t>(t);
  const auto ci = static_cast<std::uint64_t>(c);
  RandomStream channel_rng(derive_seed(plan.master_seed, {3, ci, ti}));
  const model::ChannelSampler sampler(stats);

  if (v.csi == CsiMode::statistical) {
    // One solve per covariance realization, reused for every channel draw.
    const auto sol = statcsi::optimize(stats, cfg, std::nullopt, phi0);
    const auto rep = rate::ergodic_sum_rate_mc(sampler, sol.phi, sol.precoders, plan.n_channel_realizations,
                                               channel_rng);
    out.rate = rep.sum_rate;
    out.iterations = sol.iterations_used;
  } else {
    double total = 0.0;
    double iters = 0.0;
    for (int d = 0; d < plan.n_channel_realizations; ++d) {
      const auto ch = sampler.draw(phi0, channel_rng);
      RandomStream err_rng(derive_seed(plan.master_seed, {4, ci, ti, static_cast<std::uint64_t>(d)}));
      auto sc = impcsi::make_scenario(ch, phi0, plan.imperfect.error_budget, plan.imperfect.split, cfg, err_rng);
      if (v.csi == CsiMode::naive) sc = sc.naive();
      const auto sol = impcsi::optimize_imperfect(sc, phi0);
      const auto h = sc.true_channels(sol.phi);
      total += rate::report_from_sinrs(rate::instantaneous_sinrs(h, sol.precoders)).sum_rate;
      iters += sol.iterations_used;
    }
    out.rate = total / plan.n_channel_realizations;
    out.iterations = iters / plan.n_channel_realizations;
  }
  out.ok = true;
  return out;
}

}  // namespace

std::string Variant::label() const {
  std::string s = csi == CsiMode::statistical ? "stat" : csi == CsiMode::imperfect ? "imperfect" : "naive";
  s += rate_splitting ? ":RS:" : ":noRS:";
  s += ris == RisMode::optimized ? "OptRIS" : ris == RisMode::random ? "RandRIS" : "noRIS";
  return s;
}

Variant Variant::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("variant '" + text + "' is not of the form csi:rs:ris");
  Variant v;
  if (parts[0] == "stat") v.csi = CsiMode::statistical;
  else if (parts[0] == "imperfect") v.csi = CsiMode::imperfect;
  else if (parts[0] == "naive") v.csi = CsiMode::naive;
  else throw InvalidArgument("unknown CSI mode '" + parts[0] + "' in variant '" + text + "'");
  if (parts[1] == "RS") v.rate_splitting = true;
  else if (parts[1] == "noRS") v.rate_splitting = false;
  else throw InvalidArgument("unknown RS flag '" + parts[1] + "' in variant '" + text + "'");
  if (parts[2] == "OptRIS") v.ris = RisMode::optimized;
  else if (parts[2] == "RandRIS") v.ris = RisMode::random;
  else if (parts[2] == "noRIS") v.ris = RisMode::none;
  else throw InvalidArgument("unknown RIS mode '" + parts[2] + "' in variant '" + text + "'");
  return v;
}

void ExperimentPlan::validate() const {
  scenario.validate();
  if (pt_grid_dB.empty()) throw InvalidArgument("Pt_dB grid is empty");
  if (n_cov_realizations < 1) throw InvalidArgument("n_cov_realizations must be at least 1");
  if (n_channel_realizations < 1) throw InvalidArgument("n_channel_realizations must be at least 1");
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(imperfect.error_budget >= 0.0)) throw InvalidArgument("error_budget must be non-negative");
}

void ExperimentPlan::apply_paper_scale() {
  n_cov_realizations = 100;
  n_channel_realizations = 1000;
}

fp::OptimizerConfig plan_optimizer_config(const ExperimentPlan& plan, double pt_dB) {
  fp::OptimizerConfig cfg;
  cfg.pt = db_to_linear(pt_dB);
  cfg.max_iters = plan.max_iters;
  cfg.rel_tol = plan.rel_tol;
  return cfg;
}

model::ChannelStatistics plan_statistics(const model::ScenarioConfig& scenario, std::uint64_t master_seed,
                                         int cov_index) {
  RandomStream rng(derive_seed(master_seed, {1, static_cast<std::uint64_t>(cov_index)}));
  return model::synthesize_covariances(scenario, rng);
}

PlanResult run_plan(const ExperimentPlan& plan, const RunOptions& opts) {
  plan.validate();
  const int V = static_cast<int>(plan.variants.size());
  const int T = static_cast<int>(plan.pt_grid_dB.size());
  const int C = plan.n_cov_realizations;
  const int n_cells = V * T * C;
  std::vector<CellOutcome> cells(n_cells);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n_cells; i = next++) {
      const int v = i / (T * C);
      const int t = (i / C) % T;
      const int c = i % C;
      const auto start = std::chrono::steady_clock::now();
      try {
        cells[i] = run_cell(plan, plan.variants[v], t, c);
      } catch (const std::exception& e) {
        cells[i].ok = false;
        cells[i].reason = e.what();
      }
      if (opts.timing)
        cells[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int workers = std::max(1, std::min(opts.workers, n_cells));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  PlanResult result;
  for (int v = 0; v < V; ++v) {
    for (int t = 0; t < T; ++t) {
      ResultRow row;
      row.variant = plan.variants[v].label();
      row.pt_dB = plan.pt_grid_dB[t];
      double sum = 0.0;
      double sum_sq = 0.0;
      double iters = 0.0;
      for (int c = 0; c < C; ++c) {
        const auto& cell = cells[(v * T + t) * C + c];
        row.seconds += cell.seconds;
        if (!cell.ok) {
          ++row.failed;
          result.failures.push_back({row.variant, row.pt_dB, c, cell.reason});
          continue;
        }
        ++row.completed;
        sum += cell.rate;
        sum_sq += cell.rate * cell.rate;
        iters += cell.iterations;
      }
      const int n = row.completed;
      if (n > 0) {
        row.mean = sum / n;
        row.mean_iterations = iters / n;
      }
      if (n > 1) {
        const double var = std::max(0.0, (sum_sq - n * row.mean * row.mean) / (n - 1));
        row.stderr_ = std::sqrt(var / n);
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

fp::Solution convergence_experiment(const model::ScenarioConfig& scenario, const fp::OptimizerConfig& cfg) {
  RandomStream rng(scenario.seed);
  const auto stats = model::synthesize_covariances(scenario, rng);
  auto traced = cfg;
  traced.trace = true;
  return statcsi::optimize(stats, traced);
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream ss;
  ss << "variant,Pt_dB,mean,stderr,iters,seconds\n";
  for (const auto& r : rows) {
    ss << r.variant << ',' << format_double(r.pt_dB) << ',';
    if (r.completed > 0) {
      ss << format_double(r.mean) << ',' << format_double(r.stderr_) << ',' << format_double(r.mean_iterations);
    } else {
      ss << ",,";
    }
    ss << ',' << format_double(r.seconds) << '\n';
  }
  return ss.str();
}

std::string trace_csv(const std::vector<fp::IterationRecord>& trace) {
  std::ostringstream ss;
  ss.precision(15);
  ss << "iteration,fp_objective,sum_rate_bits,k_opt_precoder,k_opt_phase,power_residual\n";
  for (const auto& r : trace)
    ss << r.iteration << ',' << r.fp_objective << ',' << r.sum_rate_bits << ',' << r.k_opt_precoder << ','
       << r.k_opt_phase << ',' << r.power_residual << '\n';
  return ss.str();
}

std::string manifest_json(const ExperimentPlan& plan, const PlanResult& result, const RunOptions& opts) {
  using nlohmann::json;
  json j;
  j["plan"] = json::parse(config::plan_to_json_text(plan));
  j["seed_scheme"] = {{"derivation", "splitmix64 over (master_seed, path)"},
                      {"statistics", "{1, cov_index}"},
                      {"random_phases", "{2, cov_index}"},
                      {"channels", "{3, cov_index, Pt_index}"},
                      {"estimation_errors", "{4, cov_index, Pt_index, draw}"}};
  j["timing"] = opts.timing;
  json failures = json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"variant", f.variant}, {"Pt_dB", f.pt_dB}, {"cov_index", f.cov_index}, {"reason", f.reason}});
  j["failures"] = failures;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace rsris::harness
