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

// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsris/rsris.h"

namespace {

constexpr int kExitUsage = 1;

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  usage error (unknown flag, missing argument)\n"
    "  2  invalid argument value\n"
    "  3  file could not be read or written\n"
    "  4  malformed scenario, plan or matrix file\n"
    "  5  statistics violate an invariant (Hermitian, PSD, dimensions)\n"
    "  6  optimizer reached a degenerate state\n"
    "  7  eigenvector iteration did not converge\n"
    "  8  internal error\n"
    "Errors are reported on stderr as one line:\n"
    "  rsris_cli: error=<name> exit=<code> message=<text>\n";

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int report(const char* name, int code, const std::string& message) {
  std::fprintf(stderr, "rsris_cli: error=%s exit=%d message=%s\n", name, code, one_line(message).c_str());
  return code;
}

// Throws nothing; converts a failed status into the process exit code.
struct StatusError {
  int code;
};

void check(rsris_status s) {
  if (s != RSRIS_OK) {
    report(rsris_status_string(s), static_cast<int>(s), rsris_last_error());
    throw StatusError{static_cast<int>(s)};
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Scenario = Handle<rsris_scenario, rsris_scenario_free>;
using Stats = Handle<rsris_stats, rsris_stats_free>;
using Solution = Handle<rsris_solution, rsris_solution_free>;
using Plan = Handle<rsris_plan, rsris_plan_free>;
using Results = Handle<rsris_results, rsris_results_free>;

struct Options {
  std::string scenario;
  std::string stats;
  std::string plan;
  std::string out;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::vector<double> pt_dB;
  std::optional<int> max_iters;
  std::optional<double> rel_tol;
  std::optional<int> pi_max_iters;
  std::vector<std::string> variants;
  int workers = 1;
  bool timing = false;
  int mc_samples = 0;
};

// Parses "stat:RS:OptRIS"-style labels for the single-solve commands.
void apply_variant(const std::string& label, rsris_optimizer_config& cfg, bool& strip_ris) {
  const auto a = label.find(':');
  const auto b = label.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    report("invalid_argument", RSRIS_E_INVALID_ARGUMENT, "variant '" + label + "' is not of the form csi:rs:ris");
    throw StatusError{RSRIS_E_INVALID_ARGUMENT};
  }
  const auto csi = label.substr(0, a);
  const auto rs = label.substr(a + 1, b - a - 1);
  const auto ris = label.substr(b + 1);
  const bool ok = csi == "stat" && (rs == "RS" || rs == "noRS") && (ris == "OptRIS" || ris == "noRIS");
  if (!ok) {
    report("invalid_argument", RSRIS_E_INVALID_ARGUMENT,
           "single solves support stat:{RS,noRS}:{OptRIS,noRIS}, got '" + label + "'");
    throw StatusError{RSRIS_E_INVALID_ARGUMENT};
  }
  cfg.rate_splitting = rs == "RS" ? 1 : 0;
  strip_ris = ris == "noRIS";
}

rsris_optimizer_config make_config(const Options& o, const rsris_scenario* scenario) {
  rsris_optimizer_config cfg;
  rsris_optimizer_config_default(&cfg);
  if (!o.pt_dB.empty()) {
    cfg.pt_dB = o.pt_dB.front();
  } else if (scenario != nullptr) {
    int has = 0;
    double pt = 0.0;
    check(rsris_scenario_pt_dB(scenario, &pt, &has));
    if (has) cfg.pt_dB = pt;
  }
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (o.rel_tol) cfg.rel_tol = *o.rel_tol;
  if (o.pi_max_iters) cfg.pi_max_iters = *o.pi_max_iters;
  return cfg;
}

int cmd_optimize(const Options& o) {
  Scenario scenario;
  Stats stats;
  if (!o.stats.empty()) {
    check(rsris_stats_load(o.stats.c_str(), &stats.p));
  } else {
    check(rsris_scenario_load(o.scenario.c_str(), &scenario.p));
    if (o.seed) check(rsris_scenario_set_seed(scenario.p, *o.seed));
    check(rsris_stats_synthesize(scenario.p, &stats.p));
  }
  auto cfg = make_config(o, scenario.p);
  bool strip_ris = false;
  if (!o.variants.empty()) apply_variant(o.variants.front(), cfg, strip_ris);
  if (strip_ris) cfg.phase_update = 0;
  cfg.trace = o.trace.empty() ? 0 : 1;

  if (strip_ris) {
    Stats bare;
    check(rsris_stats_without_ris(stats.p, &bare.p));
    std::swap(stats.p, bare.p);
  }
  Solution sol;
  check(rsris_optimize(stats.p, &cfg, &sol.p));
  rsris_rate_summary s;
  check(rsris_solution_summary(sol.p, &s));

  std::string text;
  char buf[256];
  std::snprintf(buf, sizeof buf, "sum_rate_bpcu %.10g\nprivate_rate_bpcu %.10g\ncommon_rate_bpcu %.10g\n", s.sum_rate,
                s.private_rate, s.common_rate);
  text += buf;
  std::snprintf(buf, sizeof buf, "common_user %d\niterations %d\n", s.common_user, s.iterations);
  text += buf;
  if (o.mc_samples > 0) {
    double mean = 0.0, se = 0.0;
    check(rsris_solution_ergodic_rate(sol.p, stats.p, o.mc_samples, o.seed.value_or(1), &mean, &se));
    std::snprintf(buf, sizeof buf, "ergodic_sum_rate_bpcu %.10g\nergodic_stderr %.10g\n", mean, se);
    text += buf;
  }
  std::fputs(text.c_str(), stdout);
  if (!o.out.empty()) {
    std::FILE* f = std::fopen(o.out.c_str(), "wb");
    if (f == nullptr) return report("io", RSRIS_E_IO, "cannot write '" + o.out + "'");
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  if (!o.trace.empty()) check(rsris_solution_write_trace(sol.p, o.trace.c_str()));
  return 0;
}

int cmd_converge(const Options& o) {
  Scenario scenario;
  check(rsris_scenario_load(o.scenario.c_str(), &scenario.p));
  if (o.seed) check(rsris_scenario_set_seed(scenario.p, *o.seed));
  auto cfg = make_config(o, scenario.p);
  bool strip_ris = false;
  if (!o.variants.empty()) apply_variant(o.variants.front(), cfg, strip_ris);
  if (strip_ris) return report("invalid_argument", RSRIS_E_INVALID_ARGUMENT, "converge needs an RIS variant");
  Solution sol;
  check(rsris_converge(scenario.p, &cfg, &sol.p));
  const std::string path = !o.out.empty() ? o.out : o.trace;
  check(rsris_solution_write_trace(sol.p, path.c_str()));
  rsris_rate_summary s;
  check(rsris_solution_summary(sol.p, &s));
  std::printf("iterations %d\nsum_rate_bpcu %.10g\ntrace %s\n", s.iterations, s.sum_rate, path.c_str());
  return 0;
}

int cmd_sweep(const Options& o) {
  Plan plan;
  check(rsris_plan_load(o.plan.c_str(), &plan.p));
  if (o.seed) check(rsris_plan_set_master_seed(plan.p, *o.seed));
  if (!o.pt_dB.empty()) check(rsris_plan_set_pt_grid(plan.p, o.pt_dB.data(), o.pt_dB.size()));
  if (o.max_iters || o.rel_tol) {
    // Unset overrides keep the defaults of the optimizer.
    check(rsris_plan_set_optimizer(plan.p, o.max_iters.value_or(100), o.rel_tol.value_or(1e-4)));
  }
  if (!o.variants.empty()) {
    std::string joined;
    for (const auto& v : o.variants) joined += (joined.empty() ? "" : ",") + v;
    check(rsris_plan_set_variants(plan.p, joined.c_str()));
  }
  Results res;
  check(rsris_plan_run(plan.p, o.workers, o.timing ? 1 : 0, &res.p));
  check(rsris_results_write_csv(res.p, o.out.c_str()));
  check(rsris_results_write_manifest(res.p, (o.out + ".manifest.json").c_str()));
  const auto failures = rsris_results_failures(res.p);
  std::printf("rows %zu\nfailed_cells %zu\nresults %s\n", rsris_results_rows(res.p), failures, o.out.c_str());
  return 0;
}

int cmd_validate(const Options& o) {
  Stats stats;
  check(rsris_stats_load(o.stats.c_str(), &stats.p));
  check(rsris_stats_validate(stats.p));
  int M = 0, K = 0, N = 0;
  check(rsris_stats_dims(stats.p, &M, &K, &N));
  std::printf("valid M=%d K=%d N=%d\n", M, K, N);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsris: rate splitting with statistically optimized RIS phases"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  Options o;

  auto* optimize = app.add_subcommand("optimize", "One statistical-CSI solve; prints the rate report");
  auto* input = optimize->add_option_group("input");
  input->add_option("--scenario", o.scenario, "Scenario JSON file (statistics are synthesized)");
  input->add_option("--stats", o.stats, "Statistics matrix file");
  input->require_option(1);
  optimize->add_option("--out", o.out, "Also write the rate report to this file");
  optimize->add_option("--trace", o.trace, "Write the iteration trace CSV to this file");
  optimize->add_option("--mc-samples", o.mc_samples, "Monte Carlo draws for the ergodic rate (0 = skip)")
      ->check(CLI::NonNegativeNumber);

  auto* sweep = app.add_subcommand("sweep", "Run an experiment plan and write the result table");
  sweep->add_option("--plan", o.plan, "Plan JSON file")->required();
  sweep->add_option("--out", o.out, "Result CSV path; the manifest goes to <out>.manifest.json")->required();
  sweep->add_option("--workers", o.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--timing", o.timing, "Record wall times (makes the table run-dependent)");

  auto* converge = app.add_subcommand("converge", "Traced solve on one covariance realization");
  converge->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  auto* converge_out = converge->add_option_group("output");
  converge_out->add_option("--out", o.out, "Trace CSV path");
  converge_out->add_option("--trace", o.trace, "Trace CSV path (alias of --out)");
  converge_out->require_option(1);

  auto* validate = app.add_subcommand("validate-stats", "Check a statistics file against all invariants");
  validate->add_option("--stats", o.stats, "Statistics matrix file")->required();

  for (auto* sub : {optimize, converge})
    sub->add_option("--pi-max-iters", o.pi_max_iters, "Power-iteration budget of each phase step");

  for (auto* sub : {optimize, sweep, converge}) {
    sub->add_option("--seed", o.seed, "Scenario seed (optimize, converge) or master seed (sweep)");
    sub->add_option("--Pt-dB", o.pt_dB, "Transmit power in dB; sweep accepts a list");
    sub->add_option("--max-iters", o.max_iters, "Maximum optimizer iterations");
    sub->add_option("--rel-tol", o.rel_tol, "Relative stopping tolerance on the sum rate");
    sub->add_option("--variant", o.variants, "Variant label csi:rs:ris, e.g. stat:RS:OptRIS; sweep accepts a list");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", kExitUsage, e.what());
  }

  try {
    // Fault hook for exercising the internal-error path from tests.
    if (const char* fault = std::getenv("RSRIS_CLI_FAULT"); fault != nullptr && std::string(fault) == "internal")
      throw std::logic_error("injected internal fault");
    if (*optimize) return cmd_optimize(o);
    if (*sweep) return cmd_sweep(o);
    if (*converge) return cmd_converge(o);
    if (*validate) return cmd_validate(o);
  } catch (const StatusError& e) {
    return e.code;
  } catch (const std::exception& e) {
    return report("internal", RSRIS_E_INTERNAL, e.what());
  }
  return report("usage", kExitUsage, "no subcommand given");
}
