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

#include "cram/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "cram/chart.hpp"
#include "cram/evaluate.hpp"
#include "cram/heuristic.hpp"
#include "cram/io.hpp"

namespace cram {
namespace detail {
extern const char kPingFixtureJson[];
}  // namespace detail

namespace {

using nlohmann::json;

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(x, decimals));
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

PingFixture PingFixture::from_json(const json& doc) {
  PingFixture f;
  try {
    f.provenance_ = doc.value("provenance", "");
    for (const json& s : doc.at("sites")) {
      Site site;
      site.id = f.sites_.size();
      site.name = s.at("name").get<std::string>();
      site.longitude = s.at("longitude").get<double>();
      f.sites_.push_back(std::move(site));
    }
    const std::size_t n = f.sites_.size();
    const json& rows = doc.at("rtt_ms");
    if (rows.size() != n) throw FixtureError("fixture rtt_ms must have one row per site");
    f.rtt_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw FixtureError("fixture rtt_ms must be square");
      for (std::size_t j = 0; j < n; ++j) f.rtt_(i, j) = rows[i][j].get<double>();
    }
    for (auto it = doc.at("groups").begin(); it != doc.at("groups").end(); ++it)
      f.groups_[it.key()] = it.value().get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FixtureError(std::string("malformed ping fixture: ") + e.what());
  }
  // Reuse the network invariants (symmetry, zero diagonal, non-negative).
  try {
    NetworkMatrix check(f.sites_, f.rtt_, f.rtt_);
  } catch (const InstanceError& e) {
    throw FixtureError(std::string("ping fixture: ") + e.what());
  }
  for (const auto& [name, members] : f.groups_)
    for (const std::string& m : members)
      if (std::none_of(f.sites_.begin(), f.sites_.end(), [&](const Site& s) { return s.name == m; }))
        throw FixtureError("fixture group '" + name + "' names unknown site '" + m + "'");
  return f;
}

const PingFixture& PingFixture::embedded() {
  static const PingFixture fixture = from_json(json::parse(detail::kPingFixtureJson));
  return fixture;
}

PingFixture PingFixture::load(const std::string& path) {
  try {
    return from_json(parse_json(read_file(path), path));
  } catch (const InputError& e) {
    throw FixtureError(e.what());
  }
}

const std::vector<std::string>& PingFixture::group(std::string_view name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw FixtureError("unknown fixture group '" + std::string(name) + "'");
  return it->second;
}

NetworkMatrix PingFixture::network(const std::vector<std::string>& names, double cost_per_ms) const {
  std::vector<std::size_t> idx;
  std::vector<Site> sites;
  for (const std::string& name : names) {
    auto it = std::find_if(sites_.begin(), sites_.end(), [&](const Site& s) { return s.name == name; });
    if (it == sites_.end()) throw FixtureError("unknown fixture site '" + name + "'");
    idx.push_back(it->id);
    sites.push_back(*it);
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd time(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) time(i, j) = 0.5 * rtt_(idx[i], idx[j]);
  return NetworkMatrix::with_linear_cost(std::move(sites), std::move(time), cost_per_ms);
}

std::string_view to_string(ScenarioKind kind) { return kind == ScenarioKind::kOdl ? "ODL" : "MMOG"; }

std::string_view to_string(Distribution d) {
  return d == Distribution::kHomogeneous ? "homogeneous" : "heterogeneous";
}

ScenarioKind parse_scenario_kind(std::string_view t) {
  const std::string s = lower(t);
  if (s == "odl") return ScenarioKind::kOdl;
  if (s == "mmog") return ScenarioKind::kMmog;
  throw InputError("unknown scenario kind '" + std::string(t) + "' (expected ODL or MMOG)");
}

Distribution parse_distribution(std::string_view t) {
  const std::string s = lower(t);
  if (s == "homogeneous") return Distribution::kHomogeneous;
  if (s == "heterogeneous") return Distribution::kHeterogeneous;
  throw InputError("unknown distribution '" + std::string(t) + "'");
}

Instance generate(const ScenarioSpec& spec, const PingFixture& fixture) {
  if (spec.participant_count < 2) throw InstanceError("a scenario needs at least 2 participants");
  const std::vector<std::string>& names = fixture.group(spec.kind == ScenarioKind::kOdl ? "usa" : "world");
  NetworkMatrix network = fixture.network(names, spec.cost_per_ms);
  const std::size_t sites = network.size();

  std::vector<ServerSpec> servers;
  for (std::size_t s = 0; s < sites; ++s) servers.push_back({s, 10240.0, 0.01});

  std::size_t west = 0;
  std::size_t east = 0;
  for (std::size_t s = 1; s < sites; ++s) {
    if (network.sites()[s].longitude < network.sites()[west].longitude) west = s;
    if (network.sites()[s].longitude > network.sites()[east].longitude) east = s;
  }

  const int n = spec.participant_count;
  std::vector<Participant> participants;
  for (int i = 0; i < n; ++i) {
    std::size_t site;
    if (spec.distribution == Distribution::kHomogeneous)
      site = static_cast<std::size_t>(i) % sites;
    else
      site = i < (n + 1) / 2 ? west : east;
    char id[16];
    std::snprintf(id, sizeof id, "p%05d", i);
    participants.push_back({id, site});
  }
  if (spec.seed != 0) {
    std::mt19937_64 rng(spec.seed);
    std::shuffle(participants.begin(), participants.end(), rng);
  }
  return Instance(std::move(servers), std::move(participants), std::move(network));
}

std::vector<SweepRow> sweep(const std::vector<ScenarioSpec>& specs, const PingFixture& fixture) {
  std::vector<SweepRow> rows;
  for (const ScenarioSpec& spec : specs) {
    SweepRow row;
    row.spec = spec;
    const Instance instance = generate(spec, fixture);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Plan plan = cram_allocate(instance);
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      row.metrics = metrics(plan, instance);
      row.feasible = true;
    } catch (const InfeasibleError& e) {
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      row.phase = e.phase();
      row.reason = e.reason();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScenarioSpec> parse_sweep_spec(const json& doc) {
  std::vector<ScenarioSpec> specs;
  if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array())
    throw InputError("sweep spec: expected an object with a 'runs' array");
  for (std::size_t i = 0; i < doc["runs"].size(); ++i) {
    const json& r = doc["runs"][i];
    const std::string where = "runs[" + std::to_string(i) + "]";
    try {
      const ScenarioKind kind = parse_scenario_kind(r.at("kind").get<std::string>());
      std::vector<Distribution> dists;
      const std::string d = r.value("distribution", "both");
      if (lower(d) == "both")
        dists = {Distribution::kHomogeneous, Distribution::kHeterogeneous};
      else
        dists = {parse_distribution(d)};
      std::vector<int> counts;
      if (r.at("n").is_array())
        counts = r.at("n").get<std::vector<int>>();
      else
        counts = {r.at("n").get<int>()};
      const auto seed = r.value("seed", std::uint64_t{0});
      const double kappa = r.value("cost_per_ms", 0.01);
      for (Distribution dist : dists)
        for (int n : counts) {
          if (n < 2) throw InputError(where + ": n must be at least 2");
          specs.push_back({kind, dist, n, seed, kappa});
        }
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    } catch (const InputError& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      throw InputError(where + ": " + msg);
    }
  }
  return specs;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream csv;
  csv << "scenario,distribution,n,server_cost,network_cost,total_cost,max_delay_ms,vm_count,"
         "allocated_mb,mean_compression_rate,median_compression_rate,status\n";
  for (const SweepRow& r : rows) {
    csv << to_string(r.spec.kind) << ',' << to_string(r.spec.distribution) << ','
        << r.spec.participant_count << ',';
    if (r.feasible) {
      const PlanMetrics& m = r.metrics;
      csv << fixed(m.server_cost, 4) << ',' << fixed(m.network_cost, 4) << ','
          << fixed(m.total_cost, 4) << ',' << fixed(m.max_delay, 3) << ',' << m.vm_count << ','
          << fixed(m.allocated_memory, 3) << ',' << fixed(mean(m.compression_rates), 4) << ','
          << fixed(median(m.compression_rates), 4) << ",feasible\n";
    } else {
      csv << ",,,,,,,,infeasible:" << r.phase << '\n';
    }
  }
  return csv.str();
}

std::vector<std::string> write_sweep_charts(const std::vector<SweepRow>& rows, const std::string& dir) {
  struct Metric {
    const char* key;
    const char* label;
    double (*get)(const PlanMetrics&);
  };
  static const Metric kMetrics[] = {
      {"total_cost", "total cost ($)", [](const PlanMetrics& m) { return m.total_cost; }},
      {"allocated_mb", "allocated memory (MB)", [](const PlanMetrics& m) { return m.allocated_memory; }},
      {"network_cost", "network cost ($)", [](const PlanMetrics& m) { return m.network_cost; }},
      {"median_compression_rate", "median compression rate",
       [](const PlanMetrics& m) { return median(m.compression_rates); }},
  };
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (ScenarioKind kind : {ScenarioKind::kOdl, ScenarioKind::kMmog}) {
    std::set<int> counts;
    for (const SweepRow& r : rows)
      if (r.spec.kind == kind) counts.insert(r.spec.participant_count);
    if (counts.empty()) continue;
    std::vector<std::string> categories;
    for (int n : counts) categories.push_back(std::to_string(n));
    for (const Metric& metric : kMetrics) {
      std::vector<BarSeries> series;
      for (Distribution d : {Distribution::kHomogeneous, Distribution::kHeterogeneous}) {
        BarSeries s{std::string(to_string(d)), {}};
        for (int n : counts) {
          std::optional<double> v;
          for (const SweepRow& r : rows)
            if (r.spec.kind == kind && r.spec.distribution == d && r.spec.participant_count == n &&
                r.feasible)
              v = metric.get(r.metrics);
          s.values.push_back(v);
        }
        series.push_back(std::move(s));
      }
      const std::string path =
          (std::filesystem::path(dir) / (lower(to_string(kind)) + "_" + metric.key + ".svg")).string();
      write_file(path, grouped_bar_svg(std::string(to_string(kind)) + ": " + metric.label,
                                       metric.label, categories, series));
      paths.push_back(path);
    }
  }
  return paths;
}

}  // namespace cram
