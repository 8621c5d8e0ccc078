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
#include <string>
#include <vector>

#include "core_model.hpp"
#include "imperfect_csi_optimizer.hpp"

namespace rsris::harness {

enum class CsiMode { statistical, imperfect, naive };
enum class RisMode { optimized, random, none };

/// One algorithm variant, written as "<csi>:<rs>:<ris>", e.g. "stat:RS:OptRIS".
/// csi: stat | imperfect | naive; rs: RS | noRS; ris: OptRIS | RandRIS | noRIS.
struct Variant {
  CsiMode csi = CsiMode::statistical;
  bool rate_splitting = true;
  RisMode ris = RisMode::optimized;

  std::string label() const;
  static Variant parse(const std::string& text);
  bool operator==(const Variant&) const = default;
};

struct ImperfectSettings {
  double error_budget = 1.0;  // total error variance per antenna, C_err = budget * I
  impcsi::ErrorSplit split = impcsi::ErrorSplit::cascaded;
};

struct ExperimentPlan {
  model::ScenarioConfig scenario;
  std::vector<double> pt_grid_dB;
  int n_cov_realizations = 20;
  int n_channel_realizations = 200;
  std::vector<Variant> variants;
  std::uint64_t master_seed = 1;
  int max_iters = 100;
  double rel_tol = 1e-4;
  ImperfectSettings imperfect;

  void validate() const;
  /// 100 covariance x 1000 channel realizations.
  void apply_paper_scale();
};

}  // namespace rsris::harness

namespace rsris::config {

inline constexpr int kSchemaVersion = 1;

/// JSON scenario description. Throws Error(ErrorCode::parse) on malformed
/// input and InvalidArgument on out-of-range values.
model::ScenarioConfig scenario_from_json_text(const std::string& text);
model::ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json_text(const model::ScenarioConfig& s);

/// Plan files embed the scenario ("scenario") or point to one
/// ("scenario_file", relative to the plan file).
harness::ExperimentPlan plan_from_json_text(const std::string& text, const std::string& base_dir = ".");
harness::ExperimentPlan load_plan(const std::string& path);
std::string plan_to_json_text(const harness::ExperimentPlan& plan);

std::string read_text_file(const std::string& path);

}  // namespace rsris::config
