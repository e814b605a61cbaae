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

#ifndef CRAM_SCENARIOS_HPP_
#define CRAM_SCENARIOS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cram/model.hpp"

namespace cram {

/// Raised for fixture problems: unreadable data, unknown group or site.
class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot of average round-trip pings between datacenter cities.
class PingFixture {
 public:
  static PingFixture from_json(const nlohmann::json& doc);
  /// The snapshot compiled into the library.
  static const PingFixture& embedded();
  static PingFixture load(const std::string& path);

  const std::vector<Site>& sites() const { return sites_; }
  /// Round-trip pings in ms.
  const Eigen::MatrixXd& rtt_ms() const { return rtt_; }
  const std::vector<std::string>& group(std::string_view name) const;
  const std::string& provenance() const { return provenance_; }

  /// Network restricted to the named sites, in the given order. Transmission
  /// time is half the round trip; cost is cost_per_ms times that time.
  NetworkMatrix network(const std::vector<std::string>& names, double cost_per_ms) const;

 private:
  std::vector<Site> sites_;
  Eigen::MatrixXd rtt_;
  std::map<std::string, std::vector<std::string>, std::less<>> groups_;
  std::string provenance_;
};

/// Online distance learning over the USA servers, or online gaming over the
/// world servers.
enum class ScenarioKind { kOdl, kMmog };
/// Participants spread over every server site, or split between the
/// westernmost and easternmost sites.
enum class Distribution { kHomogeneous, kHeterogeneous };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kOdl;
  Distribution distribution = Distribution::kHomogeneous;
  int participant_count = 2;
  std::uint64_t seed = 0;
  double cost_per_ms = 0.01;
};

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(Distribution d);
ScenarioKind parse_scenario_kind(std::string_view text);
Distribution parse_distribution(std::string_view text);

/// One server per fixture site of the scenario's group, default media and
/// delay bound. A non-zero seed shuffles the participant order.
Instance generate(const ScenarioSpec& spec, const PingFixture& fixture = PingFixture::embedded());

struct SweepRow {
  ScenarioSpec spec;
  bool feasible = false;
  std::string phase;
  std::string reason;
  PlanMetrics metrics;
  double runtime_ms = 0.0;
};

/// Runs the heuristic on every spec; infeasible runs become rows, not errors.
std::vector<SweepRow> sweep(const std::vector<ScenarioSpec>& specs,
                            const PingFixture& fixture = PingFixture::embedded());

/// Expands {"runs": [{"kind", "distribution", "n": [...], "seed"}]} where
/// distribution may be "both".
std::vector<ScenarioSpec> parse_sweep_spec(const nlohmann::json& doc);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes one grouped-bar SVG per scenario kind and metric into `dir`;
/// returns the file paths.
std::vector<std::string> write_sweep_charts(const std::vector<SweepRow>& rows,
                                            const std::string& dir);

}  // namespace cram

#endif  // CRAM_SCENARIOS_HPP_
