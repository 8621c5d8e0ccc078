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

#include "rsris/rsris.h"

#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "config_io.hpp"
#include "harness.hpp"
#include "stat_csi_optimizer.hpp"
#include "stats_io.hpp"

struct rsris_scenario {
  rsris::model::ScenarioConfig cfg;
};
struct rsris_stats {
  rsris::model::ChannelStatistics stats;
};
struct rsris_solution {
  rsris::fp::Solution sol;
};
struct rsris_plan {
  rsris::harness::ExperimentPlan plan;
};
struct rsris_results {
  rsris::harness::ExperimentPlan plan;
  rsris::harness::PlanResult result;
  rsris::harness::RunOptions opts;
};

namespace {

thread_local std::string g_last_error;

rsris_status fail(rsris_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename F>
rsris_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RSRIS_OK;
  } catch (const rsris::Error& e) {
    return fail(static_cast<rsris_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RSRIS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RSRIS_E_INTERNAL, e.what());
  }
}

template <typename T>
void require_ptr(const T* p, const char* name) {
  if (p == nullptr) throw rsris::InvalidArgument(std::string(name) + " is null");
}

rsris::fp::OptimizerConfig to_config(const rsris_optimizer_config& c) {
  rsris::fp::OptimizerConfig cfg;
  cfg.pt = std::pow(10.0, c.pt_dB / 10.0);
  cfg.max_iters = c.max_iters;
  cfg.rel_tol = c.rel_tol;
  cfg.rate_splitting = c.rate_splitting != 0;
  cfg.phase_update = c.phase_update != 0;
  cfg.trace = c.trace != 0;
  cfg.power_iteration.max_iters = c.pi_max_iters;
  cfg.power_iteration.tol = c.pi_tol;
  cfg.validate();
  return cfg;
}

}  // namespace

extern "C" {

const char* rsris_version(void) { return "0.1.0"; }

const char* rsris_last_error(void) { return g_last_error.c_str(); }

const char* rsris_status_string(rsris_status status) {
  switch (status) {
    case RSRIS_OK: return "ok";
    case RSRIS_E_INVALID_ARGUMENT: return "invalid_argument";
    case RSRIS_E_IO: return "io";
    case RSRIS_E_PARSE: return "parse";
    case RSRIS_E_INVARIANT: return "invariant";
    case RSRIS_E_DEGENERATE: return "degenerate";
    case RSRIS_E_NO_CONVERGENCE: return "no_convergence";
    case RSRIS_E_INTERNAL: return "internal";
  }
  return "unknown";
}

rsris_status rsris_scenario_load(const char* path, rsris_scenario** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = new rsris_scenario{rsris::config::load_scenario(path)};
  });
}

void rsris_scenario_free(rsris_scenario* s) { delete s; }

rsris_status rsris_scenario_set_seed(rsris_scenario* s, uint64_t seed) {
  return guarded([&] {
    require_ptr(s, "scenario");
    s->cfg.seed = seed;
  });
}

rsris_status rsris_scenario_pt_dB(const rsris_scenario* s, double* pt_dB, int* has_pt) {
  return guarded([&] {
    require_ptr(s, "scenario");
    require_ptr(pt_dB, "pt_dB");
    require_ptr(has_pt, "has_pt");
    *has_pt = s->cfg.pt_dB.has_value() ? 1 : 0;
    *pt_dB = s->cfg.pt_dB.value_or(0.0);
  });
}

rsris_status rsris_stats_synthesize(const rsris_scenario* s, rsris_stats** out) {
  return guarded([&] {
    require_ptr(s, "scenario");
    require_ptr(out, "out");
    rsris::RandomStream rng(s->cfg.seed);
    *out = new rsris_stats{rsris::model::synthesize_covariances(s->cfg, rng)};
  });
}

rsris_status rsris_stats_load(const char* path, rsris_stats** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = new rsris_stats{rsris::io::read_statistics(path)};
  });
}

rsris_status rsris_stats_save(const rsris_stats* st, const char* path) {
  return guarded([&] {
    require_ptr(st, "stats");
    require_ptr(path, "path");
    rsris::io::write_statistics(path, st->stats);
  });
}

rsris_status rsris_stats_validate(const rsris_stats* st) {
  return guarded([&] {
    require_ptr(st, "stats");
    st->stats.validate();
  });
}

rsris_status rsris_stats_without_ris(const rsris_stats* st, rsris_stats** out) {
  return guarded([&] {
    require_ptr(st, "stats");
    require_ptr(out, "out");
    *out = new rsris_stats{st->stats.without_ris()};
  });
}

rsris_status rsris_stats_dims(const rsris_stats* st, int* M, int* K, int* N) {
  return guarded([&] {
    require_ptr(st, "stats");
    if (M) *M = st->stats.dims.M;
    if (K) *K = st->stats.dims.K;
    if (N) *N = st->stats.dims.N;
  });
}

void rsris_stats_free(rsris_stats* st) { delete st; }

void rsris_optimizer_config_default(rsris_optimizer_config* cfg) {
  if (cfg == nullptr) return;
  const rsris::fp::OptimizerConfig d;
  cfg->pt_dB = 10.0;
  cfg->max_iters = d.max_iters;
  cfg->rel_tol = d.rel_tol;
  cfg->rate_splitting = d.rate_splitting ? 1 : 0;
  cfg->phase_update = d.phase_update ? 1 : 0;
  cfg->trace = d.trace ? 1 : 0;
  cfg->pi_max_iters = d.power_iteration.max_iters;
  cfg->pi_tol = d.power_iteration.tol;
}

rsris_status rsris_optimize(const rsris_stats* st, const rsris_optimizer_config* cfg, rsris_solution** out) {
  return guarded([&] {
    require_ptr(st, "stats");
    require_ptr(cfg, "config");
    require_ptr(out, "out");
    st->stats.validate();
    *out = new rsris_solution{rsris::statcsi::optimize(st->stats, to_config(*cfg))};
  });
}

rsris_status rsris_converge(const rsris_scenario* s, const rsris_optimizer_config* cfg, rsris_solution** out) {
  return guarded([&] {
    require_ptr(s, "scenario");
    require_ptr(cfg, "config");
    require_ptr(out, "out");
    *out = new rsris_solution{rsris::harness::convergence_experiment(s->cfg, to_config(*cfg))};
  });
}

rsris_status rsris_solution_summary(const rsris_solution* sol, rsris_rate_summary* out) {
  return guarded([&] {
    require_ptr(sol, "solution");
    require_ptr(out, "out");
    const auto& r = sol->sol.rate;
    out->sum_rate = r.sum_rate;
    out->common_rate = r.common_rate_candidate.empty() ? 0.0 : r.common_rate_candidate[r.common_user];
    out->private_rate = 0.0;
    for (double x : r.private_rate) out->private_rate += x;
    out->common_user = sol->sol.common_user;
    out->iterations = sol->sol.iterations_used;
  });
}

rsris_status rsris_solution_ergodic_rate(const rsris_solution* sol, const rsris_stats* st, int n, uint64_t seed,
                                         double* mean, double* std_error) {
  return guarded([&] {
    require_ptr(sol, "solution");
    require_ptr(st, "stats");
    require_ptr(mean, "mean");
    if (n < 1) throw rsris::InvalidArgument("sample count must be positive");
    rsris::RandomStream rng(seed);
    const auto rep = rsris::rate::ergodic_sum_rate_mc(st->stats, sol->sol.phi, sol->sol.precoders, n, rng);
    *mean = rep.sum_rate;
    if (std_error) *std_error = rep.std_error.value_or(0.0);
  });
}

size_t rsris_solution_trace_length(const rsris_solution* sol) { return sol ? sol->sol.trace.size() : 0; }

rsris_status rsris_solution_write_trace(const rsris_solution* sol, const char* path) {
  return guarded([&] {
    require_ptr(sol, "solution");
    require_ptr(path, "path");
    rsris::harness::write_text_file(path, rsris::harness::trace_csv(sol->sol.trace));
  });
}

rsris_status rsris_solution_phases(const rsris_solution* sol, double* buf, size_t n_doubles) {
  return guarded([&] {
    require_ptr(sol, "solution");
    const auto& phi = sol->sol.phi.phi();
    const auto need = static_cast<size_t>(2 * phi.size());
    if (n_doubles < need) throw rsris::InvalidArgument("phase buffer holds fewer than 2 * N doubles");
    if (need > 0) require_ptr(buf, "buf");
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      buf[2 * i] = phi(i).real();
      buf[2 * i + 1] = phi(i).imag();
    }
  });
}

void rsris_solution_free(rsris_solution* sol) { delete sol; }

rsris_status rsris_plan_load(const char* path, rsris_plan** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = new rsris_plan{rsris::config::load_plan(path)};
  });
}

rsris_status rsris_plan_set_master_seed(rsris_plan* p, uint64_t seed) {
  return guarded([&] {
    require_ptr(p, "plan");
    p->plan.master_seed = seed;
  });
}

rsris_status rsris_plan_set_pt_grid(rsris_plan* p, const double* pt_dB, size_t n) {
  return guarded([&] {
    require_ptr(p, "plan");
    if (n == 0) throw rsris::InvalidArgument("Pt_dB grid is empty");
    require_ptr(pt_dB, "pt_dB");
    p->plan.pt_grid_dB.assign(pt_dB, pt_dB + n);
  });
}

rsris_status rsris_plan_set_optimizer(rsris_plan* p, int max_iters, double rel_tol) {
  return guarded([&] {
    require_ptr(p, "plan");
    if (max_iters < 1) throw rsris::InvalidArgument("max_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw rsris::InvalidArgument("rel_tol must be positive");
    p->plan.max_iters = max_iters;
    p->plan.rel_tol = rel_tol;
  });
}

rsris_status rsris_plan_set_variants(rsris_plan* p, const char* variants) {
  return guarded([&] {
    require_ptr(p, "plan");
    require_ptr(variants, "variants");
    std::vector<rsris::harness::Variant> parsed;
    std::string cur;
    const std::string text(variants);
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ',') {
        if (!cur.empty()) parsed.push_back(rsris::harness::Variant::parse(cur));
        cur.clear();
      } else if (text[i] != ' ') {
        cur += text[i];
      }
    }
    p->plan.variants = std::move(parsed);
  });
}

void rsris_plan_free(rsris_plan* p) { delete p; }

rsris_status rsris_plan_run(const rsris_plan* p, int workers, int timing, rsris_results** out) {
  return guarded([&] {
    require_ptr(p, "plan");
    require_ptr(out, "out");
    if (workers < 1) throw rsris::InvalidArgument("worker count must be at least 1");
    rsris::harness::RunOptions opts{workers, timing != 0};
    auto result = rsris::harness::run_plan(p->plan, opts);
    *out = new rsris_results{p->plan, std::move(result), opts};
  });
}

size_t rsris_results_rows(const rsris_results* r) { return r ? r->result.rows.size() : 0; }

rsris_status rsris_results_row(const rsris_results* r, size_t index, rsris_result_row* out) {
  return guarded([&] {
    require_ptr(r, "results");
    require_ptr(out, "out");
    if (index >= r->result.rows.size()) throw rsris::InvalidArgument("row index out of range");
    const auto& row = r->result.rows[index];
    out->variant = row.variant.c_str();
    out->pt_dB = row.pt_dB;
    out->mean = row.mean;
    out->std_error = row.stderr_;
    out->mean_iterations = row.mean_iterations;
    out->seconds = row.seconds;
    out->completed = row.completed;
    out->failed = row.failed;
  });
}

size_t rsris_results_failures(const rsris_results* r) { return r ? r->result.failures.size() : 0; }

rsris_status rsris_results_write_csv(const rsris_results* r, const char* path) {
  return guarded([&] {
    require_ptr(r, "results");
    require_ptr(path, "path");
    rsris::harness::write_text_file(path, rsris::harness::results_csv(r->result.rows));
  });
}

rsris_status rsris_results_write_manifest(const rsris_results* r, const char* path) {
  return guarded([&] {
    require_ptr(r, "results");
    require_ptr(path, "path");
    rsris::harness::write_text_file(path, rsris::harness::manifest_json(r->plan, r->result, r->opts));
  });
}

void rsris_results_free(rsris_results* r) { delete r; }

}  // extern "C"
