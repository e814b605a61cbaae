/*
 * Copyright 2026 The cram Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: solve, exact, validate, compare, sweep, export-lp.
//
// Exit codes: 0 success, 1 input error, 2 infeasible (or violations found),
// 3 search bounds refusal.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cram/evaluate.hpp"
#include "cram/exact.hpp"
#include "cram/heuristic.hpp"
#include "cram/io.hpp"
#include "cram/lp.hpp"
#include "cram/scenarios.hpp"
#include "cram/validate.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitRefused = 3;

struct Common {
  std::vector<std::string> argv;
  Clock::time_point start = Clock::now();
  std::string report_path;
};

json report(const Common& c, const std::string& command, const std::string& status) {
  json r;
  r["command"] = c.argv;
  r["subcommand"] = command;
  r["status"] = status;
  return r;
}

int emit(const Common& c, json r, int code) {
  r["wall_ms"] = cram::round_to(std::chrono::duration<double, std::milli>(Clock::now() - c.start).count(), 3);
  const std::string text = r.dump(2) + "\n";
  std::cout << text;
  if (!c.report_path.empty()) cram::write_file(c.report_path, text);
  return code;
}

cram::Instance load(const std::string& path, const std::optional<std::string>& cost_mode, json& r) {
  const std::string bytes = cram::read_file(path);
  r["instance"] = path;
  r["instance_digest"] = cram::fnv1a_hex(bytes);
  cram::Instance instance = cram::instance_from_json(cram::parse_json(bytes, path));
  if (cost_mode) instance = instance.with_cost_mode(cram::parse_cost_mode(*cost_mode));
  return instance;
}

void write_plan(const std::string& path, const cram::Plan& plan, const cram::Instance& instance, json& r) {
  const std::string text = cram::plan_to_json(plan, instance).dump(2) + "\n";
  if (!path.empty()) cram::write_file(path, text);
  r["plan"] = path;
  r["plan_digest"] = cram::fnv1a_hex(text);
  r["metrics"] = cram::metrics_to_json(cram::metrics(plan, instance));
}

json infeasible_fields(const cram::InfeasibleError& e) {
  json j{{"phase", e.phase()}, {"reason", e.reason()}};
  if (e.last_handling_time_ms()) j["last_handling_time_ms"] = *e.last_handling_time_ms();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  Common common;
  common.argv.assign(argv, argv + argc);

  CLI::App app{"Media handling resource allocation for cloud video conferencing"};
  app.require_subcommand(1);
  app.add_option("--report", common.report_path, "Also write the run report JSON here");

  std::string instance_path, plan_path, out_path, spec_path, chart_dir, fixture_path;
  std::optional<std::string> cost_mode;
  std::string delay_model = "algorithm1";
  std::optional<std::string> validate_model;
  cram::SearchBounds bounds;

  const std::vector<std::string> delay_models{"algorithm1", "ilp"};
  const std::vector<std::string> cost_modes{"per-mb", "per-vm"};

  auto* solve = app.add_subcommand("solve", "Allocate with the heuristic");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->add_option("-o,--plan-out", out_path, "Plan JSON output");
  solve->add_option("--delay-model", delay_model, "Delay semantics for the reported plan")
      ->check(CLI::IsMember(delay_models));
  solve->add_option("--cost-mode", cost_mode, "Server pricing")->check(CLI::IsMember(cost_modes));

  auto add_bounds = [&](CLI::App* sub) {
    sub->add_option("--max-participants", bounds.max_participants, "Refuse above this many participants");
    sub->add_option("--max-servers", bounds.max_servers, "Refuse above this many servers");
    sub->add_option("--max-compressors", bounds.max_compressors, "Compressor limit (default 2|U|-1)");
    sub->add_option("--node-budget", bounds.node_budget, "Stream graphs evaluated before refusing");
  };

  auto* exact = app.add_subcommand("exact", "Exhaustive optimum for small instances");
  exact->add_option("instance", instance_path, "Instance JSON")->required();
  exact->add_option("-o,--plan-out", out_path, "Plan JSON output");
  exact->add_option("--cost-mode", cost_mode, "Server pricing")->check(CLI::IsMember(cost_modes));
  add_bounds(exact);

  auto* validate = app.add_subcommand("validate", "List constraint violations of a plan");
  validate->add_option("instance", instance_path, "Instance JSON")->required();
  validate->add_option("plan", plan_path, "Plan JSON")->required();
  validate->add_option("--delay-model", validate_model, "Override the plan's delay semantics")
      ->check(CLI::IsMember(delay_models));
  validate->add_option("--cost-mode", cost_mode, "Server pricing")->check(CLI::IsMember(cost_modes));

  auto* compare = app.add_subcommand("compare", "Heuristic cost against the exhaustive optimum");
  compare->add_option("instance", instance_path, "Instance JSON")->required();
  compare->add_option("--cost-mode", cost_mode, "Server pricing")->check(CLI::IsMember(cost_modes));
  add_bounds(compare);

  auto* sweep = app.add_subcommand("sweep", "Run the heuristic over a scenario grid");
  sweep->add_option("spec", spec_path, "Sweep spec JSON")->required();
  sweep->add_option("-o,--csv-out", out_path, "CSV output")->required();
  sweep->add_option("--chart-out", chart_dir, "Directory for SVG charts");
  sweep->add_option("--fixture", fixture_path, "Ping fixture JSON (default: built in)");

  auto* export_lp = app.add_subcommand("export-lp", "Write the integer program as LP text");
  export_lp->add_option("instance", instance_path, "Instance JSON")->required();
  export_lp->add_option("-o,--lp-out", out_path, "LP output")->required();
  export_lp->add_option("--cost-mode", cost_mode, "Server pricing")->check(CLI::IsMember(cost_modes));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json r = report(common, command, "ok");
  try {
    if (*solve) {
      const cram::Instance instance = load(instance_path, cost_mode, r);
      try {
        cram::Plan plan = cram::cram_allocate(instance);
        if (cram::parse_delay_model(delay_model) == cram::DelayModel::kIlp) {
          plan.delay_model = cram::DelayModel::kIlp;
          plan.per_participant_delay = cram::eval_delays(plan, instance, cram::DelayModel::kIlp);
        }
        r["status"] = "feasible";
        write_plan(out_path, plan, instance, r);
        return emit(common, r, kExitOk);
      } catch (const cram::InfeasibleError& e) {
        r["status"] = "infeasible";
        r.update(infeasible_fields(e));
        return emit(common, r, kExitInfeasible);
      }
    }

    if (*exact) {
      const cram::Instance instance = load(instance_path, cost_mode, r);
      try {
        cram::ExactStats stats;
        const cram::Plan plan = cram::brute_force_optimal(instance, bounds, &stats);
        r["status"] = "optimal";
        r["search_nodes"] = stats.nodes;
        write_plan(out_path, plan, instance, r);
        return emit(common, r, kExitOk);
      } catch (const cram::InfeasibleError& e) {
        r["status"] = "infeasible";
        r.update(infeasible_fields(e));
        return emit(common, r, kExitInfeasible);
      } catch (const cram::BoundsError& e) {
        r["status"] = "refused";
        r["reason"] = e.what();
        return emit(common, r, kExitRefused);
      }
    }

    if (*validate) {
      const cram::Instance instance = load(instance_path, cost_mode, r);
      const cram::Plan plan = cram::load_plan(plan_path, instance);
      const cram::DelayModel model =
          validate_model ? cram::parse_delay_model(*validate_model) : plan.delay_model;
      r["plan"] = plan_path;
      r["delay_model"] = std::string(cram::to_string(model));
      const std::vector<cram::Violation> found = cram::validate_plan(plan, instance, model);
      json list = json::array();
      for (const cram::Violation& v : found)
        list.push_back({{"constraint", std::string(cram::to_string(v.constraint))}, {"message", v.message}});
      r["violations"] = list;
      if (found.empty()) r["metrics"] = cram::metrics_to_json(cram::metrics(plan, instance, model));
      r["status"] = found.empty() ? "valid" : "invalid";
      return emit(common, r, found.empty() ? kExitOk : kExitInfeasible);
    }

    if (*compare) {
      const cram::Instance instance = load(instance_path, cost_mode, r);
      json h, x;
      std::optional<double> heuristic_cost, exact_cost;
      try {
        const cram::Plan plan = cram::cram_allocate(instance);
        heuristic_cost = cram::metrics(plan, instance).total_cost;
        h = cram::metrics_to_json(cram::metrics(plan, instance));
      } catch (const cram::InfeasibleError& e) {
        h = infeasible_fields(e);
      }
      try {
        const cram::Plan plan = cram::brute_force_optimal(instance, bounds);
        exact_cost = cram::metrics(plan, instance).total_cost;
        x = cram::metrics_to_json(cram::metrics(plan, instance));
      } catch (const cram::InfeasibleError& e) {
        x = infeasible_fields(e);
      } catch (const cram::BoundsError& e) {
        r["status"] = "refused";
        r["reason"] = e.what();
        return emit(common, r, kExitRefused);
      }
      r["heuristic"] = h;
      r["exact"] = x;
      if (heuristic_cost && exact_cost && *exact_cost > 0.0)
        r["cost_ratio"] = cram::round_to(*heuristic_cost / *exact_cost, 4);
      return emit(common, r, kExitOk);
    }

    if (*sweep) {
      const cram::PingFixture fixture =
          fixture_path.empty() ? cram::PingFixture::embedded() : cram::PingFixture::load(fixture_path);
      const std::string bytes = cram::read_file(spec_path);
      r["spec"] = spec_path;
      r["spec_digest"] = cram::fnv1a_hex(bytes);
      const auto specs = cram::parse_sweep_spec(cram::parse_json(bytes, spec_path));
      const auto rows = cram::sweep(specs, fixture);
      const std::string csv = cram::sweep_csv(rows);
      cram::write_file(out_path, csv);
      r["csv"] = out_path;
      r["csv_digest"] = cram::fnv1a_hex(csv);
      r["rows"] = rows.size();
      int infeasible = 0;
      for (const auto& row : rows) infeasible += !row.feasible;
      r["infeasible_rows"] = infeasible;
      if (!chart_dir.empty()) r["charts"] = cram::write_sweep_charts(rows, chart_dir);
      return emit(common, r, kExitOk);
    }

    if (*export_lp) {
      const cram::Instance instance = load(instance_path, cost_mode, r);
      const cram::LpDocument doc = cram::export_lp(instance);
      if (instance.participant_count() > 10)
        std::cerr << "warning: the program for " << instance.participant_count()
                  << " participants is large\n";
      const std::string text = doc.to_text();
      cram::write_file(out_path, text);
      const cram::LpDocument back = cram::parse_lp(text);
      r["lp"] = out_path;
      r["variables"] = doc.variables().size();
      r["binaries"] = doc.count(cram::LpVarType::kBinary);
      r["rows"] = doc.rows().size();
      r["round_trip"] = back.variables().size() == doc.variables().size() &&
                        back.rows().size() == doc.rows().size();
      return emit(common, r, kExitOk);
    }
  } catch (const cram::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cram::InstanceError& e) {
    std::cerr << "error: invalid instance: " << e.what() << "\n";
    return kExitInput;
  } catch (const cram::FixtureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const cram::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
