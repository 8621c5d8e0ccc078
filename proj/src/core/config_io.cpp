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

#include "config_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rsris::config {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::parse, what); }

void check_schema(const json& j, const char* what) {
  if (!j.is_object()) parse_error(std::string(what) + " must be a JSON object");
  if (!j.contains("schema_version")) parse_error(std::string(what) + " lacks schema_version");
  const auto v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion)
    parse_error(std::string(what) + " has schema_version " + std::to_string(v) + ", expected " +
                std::to_string(kSchemaVersion));
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<model::PathSpec> paths_from_json(const json& j) {
  std::vector<model::PathSpec> out;
  for (const auto& e : j) {
    model::PathSpec p;
    p.angle_deg = e.at("angle_deg").get<double>();
    read_opt(e, "spread_deg", p.spread_deg);
    read_opt(e, "power", p.power);
    out.push_back(p);
  }
  return out;
}

json paths_to_json(const std::vector<model::PathSpec>& paths) {
  json a = json::array();
  for (const auto& p : paths) a.push_back({{"angle_deg", p.angle_deg}, {"spread_deg", p.spread_deg}, {"power", p.power}});
  return a;
}

model::ScenarioConfig scenario_from_json(const json& j) {
  check_schema(j, "scenario");
  model::ScenarioConfig s;
  s.dims.M = j.at("M").get<int>();
  s.dims.K = j.at("K").get<int>();
  s.dims.N = j.at("N").get<int>();
  read_opt(j, "delta", s.delta);
  read_opt(j, "seed", s.seed);
  if (j.contains("Pt_dB")) s.pt_dB = j.at("Pt_dB").get<double>();
  for (const auto& u : j.at("users")) {
    model::UserSpec spec;
    spec.direct = paths_from_json(u.at("direct"));
    if (u.contains("ris")) spec.ris = paths_from_json(u.at("ris"));
    s.users.push_back(std::move(spec));
  }
  if (j.contains("bs_ris")) {
    const auto& b = j.at("bs_ris");
    read_opt(b, "aod_deg", s.bs_ris_aod_deg);
    read_opt(b, "aoa_deg", s.bs_ris_aoa_deg);
    read_opt(b, "tx_spread_deg", s.tx_spread_deg);
    read_opt(b, "ris_spread_deg", s.ris_spread_deg);
  }
  if (j.contains("gains")) {
    const auto& g = j.at("gains");
    read_opt(g, "direct", s.direct_gain);
    read_opt(g, "ris", s.ris_gain);
    read_opt(g, "bs_ris", s.bs_ris_gain);
  }
  if (j.contains("randomize")) {
    const auto& r = j.at("randomize");
    read_opt(r, "angle_jitter_deg", s.angle_jitter_deg);
    if (r.contains("power_scale")) {
      const auto& ps = r.at("power_scale");
      if (!ps.is_array() || ps.size() != 2) parse_error("randomize.power_scale must be [min, max]");
      s.power_scale_min = ps[0].get<double>();
      s.power_scale_max = ps[1].get<double>();
    }
  }
  s.validate();
  return s;
}

json scenario_to_json(const model::ScenarioConfig& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["M"] = s.dims.M;
  j["K"] = s.dims.K;
  j["N"] = s.dims.N;
  j["delta"] = s.delta;
  j["seed"] = s.seed;
  if (s.pt_dB) j["Pt_dB"] = *s.pt_dB;
  json users = json::array();
  for (const auto& u : s.users) users.push_back({{"direct", paths_to_json(u.direct)}, {"ris", paths_to_json(u.ris)}});
  j["users"] = users;
  j["bs_ris"] = {{"aod_deg", s.bs_ris_aod_deg},
                 {"aoa_deg", s.bs_ris_aoa_deg},
                 {"tx_spread_deg", s.tx_spread_deg},
                 {"ris_spread_deg", s.ris_spread_deg}};
  j["gains"] = {{"direct", s.direct_gain}, {"ris", s.ris_gain}, {"bs_ris", s.bs_ris_gain}};
  j["randomize"] = {{"angle_jitter_deg", s.angle_jitter_deg},
                    {"power_scale", {s.power_scale_min, s.power_scale_max}}};
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_error(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

model::ScenarioConfig scenario_from_json_text(const std::string& text) {
  const auto j = parse_text(text);
  return guarded([&] { return scenario_from_json(j); });
}

model::ScenarioConfig load_scenario(const std::string& path) { return scenario_from_json_text(read_text_file(path)); }

std::string scenario_to_json_text(const model::ScenarioConfig& s) { return scenario_to_json(s).dump(2) + "\n"; }

harness::ExperimentPlan plan_from_json_text(const std::string& text, const std::string& base_dir) {
  const auto j = parse_text(text);
  return guarded([&] {
    check_schema(j, "plan");
    harness::ExperimentPlan plan;
    if (j.contains("scenario")) {
      plan.scenario = scenario_from_json(j.at("scenario"));
    } else if (j.contains("scenario_file")) {
      const std::filesystem::path p = std::filesystem::path(base_dir) / j.at("scenario_file").get<std::string>();
      plan.scenario = load_scenario(p.string());
    } else {
      parse_error("plan needs either scenario or scenario_file");
    }
    plan.pt_grid_dB = j.at("Pt_dB").get<std::vector<double>>();
    read_opt(j, "n_cov_realizations", plan.n_cov_realizations);
    read_opt(j, "n_channel_realizations", plan.n_channel_realizations);
    for (const auto& v : j.at("variants")) plan.variants.push_back(harness::Variant::parse(v.get<std::string>()));
    read_opt(j, "master_seed", plan.master_seed);
    if (j.contains("optimizer")) {
      read_opt(j.at("optimizer"), "max_iters", plan.max_iters);
      read_opt(j.at("optimizer"), "rel_tol", plan.rel_tol);
    }
    if (j.contains("imperfect")) {
      const auto& im = j.at("imperfect");
      read_opt(im, "error_budget", plan.imperfect.error_budget);
      if (im.contains("error_split")) {
        const auto s = im.at("error_split").get<std::string>();
        if (s == "effective") plan.imperfect.split = impcsi::ErrorSplit::effective;
        else if (s == "cascaded") plan.imperfect.split = impcsi::ErrorSplit::cascaded;
        else parse_error("unknown error_split '" + s + "'");
      }
    }
    if (j.value("paper_scale", false)) plan.apply_paper_scale();
    plan.validate();
    return plan;
  });
}

harness::ExperimentPlan load_plan(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path();
  return plan_from_json_text(read_text_file(path), base.empty() ? "." : base.string());
}

std::string plan_to_json_text(const harness::ExperimentPlan& plan) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = scenario_to_json(plan.scenario);
  j["Pt_dB"] = plan.pt_grid_dB;
  j["n_cov_realizations"] = plan.n_cov_realizations;
  j["n_channel_realizations"] = plan.n_channel_realizations;
  json variants = json::array();
  for (const auto& v : plan.variants) variants.push_back(v.label());
  j["variants"] = variants;
  j["master_seed"] = plan.master_seed;
  j["optimizer"] = {{"max_iters", plan.max_iters}, {"rel_tol", plan.rel_tol}};
  j["imperfect"] = {{"error_budget", plan.imperfect.error_budget},
                    {"error_split", plan.imperfect.split == impcsi::ErrorSplit::effective ? "effective" : "cascaded"}};
  return j.dump(2) + "\n";
}

}  // namespace rsris::config
