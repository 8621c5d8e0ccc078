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

#include <string>
#include <vector>

#include "config_io.hpp"
#include "fp_engine.hpp"

namespace rsris::harness {

struct ResultRow {
  std::string variant;
  double pt_dB = 0.0;
  double mean = 0.0;    // mean sum rate over covariance realizations, bpcu
  double stderr_ = 0.0;  // standard error of that mean
  double mean_iterations = 0.0;
  double seconds = 0.0;  // wall time summed over cells, 0 unless timing is requested
  int completed = 0;
  int failed = 0;
};

/// A (variant, Pt, covariance realization) cell that threw.
struct CellFailure {
  std::string variant;
  double pt_dB = 0.0;
  int cov_index = 0;
  std::string reason;
};

struct RunOptions {
  int workers = 1;
  bool timing = false;
};

struct PlanResult {
  std::vector<ResultRow> rows;  // variant-major, then Pt grid order
  std::vector<CellFailure> failures;
};

/// Seeds, all derived from the master seed by counter path:
///   statistics of covariance realization c      {1, c}
///   random RIS phases of realization c          {2, c}
///   channel draws at grid point t               {3, c, t}
///   estimation errors at grid point t, draw d   {4, c, t, d}
/// Every variant sees the same statistics and channel draws.
PlanResult run_plan(const ExperimentPlan& plan, const RunOptions& opts = {});

/// Optimizer settings of a plan at one transmit power.
fp::OptimizerConfig plan_optimizer_config(const ExperimentPlan& plan, double pt_dB);

/// Statistics of covariance realization `cov_index` under a master seed.
model::ChannelStatistics plan_statistics(const model::ScenarioConfig& scenario, std::uint64_t master_seed,
                                         int cov_index);

/// One statistical-CSI optimization with the trace enabled, on the
/// statistics drawn from the scenario's own seed.
fp::Solution convergence_experiment(const model::ScenarioConfig& scenario, const fp::OptimizerConfig& cfg);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string trace_csv(const std::vector<fp::IterationRecord>& trace);
/// JSON manifest: the plan, the seed scheme and the failed cells.
std::string manifest_json(const ExperimentPlan& plan, const PlanResult& result, const RunOptions& opts);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace rsris::harness
