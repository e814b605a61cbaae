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

// Instance generators and independent reference computations shared by the
// unit tests and the acceptance run.

#ifndef CRAM_TESTS_SUPPORT_HPP_
#define CRAM_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cram/model.hpp"

namespace cram::testing {

inline std::vector<Site> named_sites(std::size_t n) {
  std::vector<Site> sites;
  for (std::size_t i = 0; i < n; ++i) sites.push_back({i, "site" + std::to_string(i), static_cast<double>(i)});
  return sites;
}

/// Every participant and server on one site.
inline Instance colocated_instance(std::size_t users, double max_delay = 400.0, std::size_t servers = 1,
                                   double capacity = 10240.0) {
  std::vector<ServerSpec> sv(servers, ServerSpec{0, capacity, 0.01});
  std::vector<Participant> ps;
  for (std::size_t u = 0; u < users; ++u) ps.push_back({"u" + std::to_string(u), 0});
  return Instance(sv, ps,
                  NetworkMatrix::with_linear_cost(named_sites(1), Eigen::MatrixXd::Zero(1, 1), 0.01), {},
                  QosSpec{max_delay});
}

/// Two sites `time` ms apart with a server on each; participants listed by
/// site index.
inline Instance two_site_instance(double time, const std::vector<std::size_t>& participant_sites,
                                  std::vector<double> capacity = {10240.0, 10240.0}, double max_delay = 400.0) {
  Eigen::MatrixXd t(2, 2);
  t << 0.0, time, time, 0.0;
  std::vector<ServerSpec> sv = {{0, capacity[0], 0.01}, {1, capacity[1], 0.01}};
  std::vector<Participant> ps;
  for (std::size_t u = 0; u < participant_sites.size(); ++u) ps.push_back({"u" + std::to_string(u), participant_sites[u]});
  return Instance(sv, ps, NetworkMatrix::with_linear_cost(named_sites(2), t, 0.01), {}, QosSpec{max_delay});
}

/// One mixer on `server` that every participant sends to and receives from.
inline Plan single_mixer_plan(std::size_t users, std::size_t server = 0) {
  Plan p;
  p.vms.push_back({VmKind::kMixer, server, static_cast<int>(users)});
  for (std::size_t u = 0; u < users; ++u) {
    p.edges.push_back({Endpoint::participant(u), Endpoint::vm(0), 0.0});
    p.edges.push_back({Endpoint::vm(0), Endpoint::participant(u), 0.0});
  }
  p.feasible = true;
  return p;
}

/// Servers on the first `servers` sites, participants on uniformly random
/// sites, independent symmetric times uniform in [0, max_time] rounded to
/// 0.1 ms.
inline Instance random_instance(std::mt19937_64& rng, std::size_t users, std::size_t servers,
                                std::size_t extra_sites, double max_time, double cost_per_ms = 0.01) {
  const std::size_t n = servers + extra_sites;
  Eigen::MatrixXd time = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::uniform_real_distribution<double> span(0.0, max_time);
  for (Eigen::Index a = 0; a < time.rows(); ++a)
    for (Eigen::Index b = a + 1; b < time.cols(); ++b) time(a, b) = time(b, a) = std::round(span(rng) * 10.0) / 10.0;
  std::vector<ServerSpec> sv;
  for (std::size_t s = 0; s < servers; ++s) sv.push_back({s});
  std::uniform_int_distribution<std::size_t> where(0, n - 1);
  std::vector<Participant> ps;
  for (std::size_t u = 0; u < users; ++u) ps.push_back({"u" + std::to_string(u), where(rng)});
  return Instance(sv, ps, NetworkMatrix::with_linear_cost(named_sites(n), time, cost_per_ms));
}

/// Sites scattered on a plane; time is proportional to Euclidean distance,
/// so it obeys the triangle inequality. Every site hosts a server.
inline Instance planar_instance(std::mt19937_64& rng, std::size_t users, std::size_t servers, double diameter_ms,
                                double cost_per_ms = 0.01) {
  std::uniform_real_distribution<double> coord(0.0, diameter_ms / std::sqrt(2.0));
  std::vector<std::pair<double, double>> at(servers);
  for (auto& p : at) p = {coord(rng), coord(rng)};
  const auto n = static_cast<Eigen::Index>(servers);
  Eigen::MatrixXd time = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      time(a, b) = time(b, a) = std::round(std::hypot(at[a].first - at[b].first, at[a].second - at[b].second) * 10.0) / 10.0;
  std::vector<ServerSpec> sv;
  for (std::size_t s = 0; s < servers; ++s) sv.push_back({s});
  std::uniform_int_distribution<std::size_t> where(0, servers - 1);
  std::vector<Participant> ps;
  for (std::size_t u = 0; u < users; ++u) ps.push_back({"u" + std::to_string(u), where(rng)});
  return Instance(sv, ps, NetworkMatrix::with_linear_cost(named_sites(servers), time, cost_per_ms));
}

/// Random stream graph under the integer program's rules, before the
/// delay and capacity checks: random VM labels, a random acyclic VM graph
/// without compressor chains, random upstream VMs, downstream VMs drawn from
/// those every participant reaches. Returns nothing when the draw breaks a
/// degree or balance rule.
inline std::optional<Plan> sample_plan(std::mt19937_64& rng, const Instance& in, int max_vms, double edge_p) {
  const std::size_t users = in.participant_count();
  const int mixer_slots = static_cast<int>(users) - 1;
  const int compressor_slots = 2 * static_cast<int>(users) - 1;
  std::uniform_int_distribution<int> count(1, std::min(max_vms, mixer_slots + compressor_slots));
  const std::size_t k = static_cast<std::size_t>(count(rng));
  std::uniform_int_distribution<std::size_t> server(0, in.server_count() - 1);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution link(edge_p);

  Plan plan;
  plan.delay_model = DelayModel::kIlp;
  int mixers = 0;
  int compressors = 0;
  for (std::size_t v = 0; v < k; ++v) {
    bool mixer = v == 0 || coin(rng);
    if (mixer && mixers >= mixer_slots) mixer = false;
    if (!mixer && compressors >= compressor_slots) mixer = true;
    (mixer ? mixers : compressors)++;
    plan.vms.push_back({mixer ? VmKind::kMixer : VmKind::kCompressor, server(rng), 0});
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::size_t a = order[i], b = order[j];
      if (plan.vms[a].is_compressor() && plan.vms[b].is_compressor()) continue;
      if (link(rng)) adj[a][b] = 1;
    }

  std::uniform_int_distribution<std::size_t> vm(0, k - 1);
  std::vector<std::size_t> up(users);
  for (auto& a : up) a = vm(rng);

  // Participants reaching each VM, by walking the order.
  std::vector<std::vector<char>> fed(k, std::vector<char>(users, 0));
  for (std::size_t u = 0; u < users; ++u) fed[up[u]][u] = 1;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (adj[order[i]][order[j]])
        for (std::size_t u = 0; u < users; ++u) fed[order[j]][u] |= fed[order[i]][u];
  std::vector<std::size_t> complete;
  for (std::size_t v = 0; v < k; ++v)
    if (std::all_of(fed[v].begin(), fed[v].end(), [](char c) { return c != 0; })) complete.push_back(v);
  if (complete.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, complete.size() - 1);

  const double gamma = in.media().gamma_rate();
  auto rate = [&](std::size_t v) { return plan.vms[v].is_compressor() ? gamma : 0.0; };
  std::vector<int> in_deg(k, 0), out_deg(k, 0);
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t down = complete[pick(rng)];
    plan.edges.push_back({Endpoint::participant(u), Endpoint::vm(up[u]), 0.0});
    plan.edges.push_back({Endpoint::vm(down), Endpoint::participant(u), rate(down)});
    ++in_deg[up[u]];
    ++out_deg[down];
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (adj[a][b]) {
        plan.edges.push_back({Endpoint::vm(a), Endpoint::vm(b), rate(a)});
        ++out_deg[a];
        ++in_deg[b];
      }
  for (std::size_t v = 0; v < k; ++v) {
    if (in_deg[v] == 0 || out_deg[v] == 0) return std::nullopt;
    if (plan.vms[v].is_compressor() && in_deg[v] != out_deg[v]) return std::nullopt;
    plan.vms[v].input_count = in_deg[v];
  }
  plan.feasible = true;
  return plan;
}

/// Mixer count by scanning every m: the first m meeting the bound and the
/// largest server wins unless the handling time rose at or before it.
struct MixerScan {
  bool feasible = false;
  int min_mixer = 0;
  int max_user = 0;
};

inline MixerScan scan_min_mixers(int users, double bound, const MediaCostModel& media, double largest_capacity) {
  std::vector<double> h(static_cast<std::size_t>(users), 0.0);
  int first_ok = 0;
  int first_rise = 0;
  for (int m = 1; m <= users - 1; ++m) {
    const int per = (users + m - 1) / m;
    h[static_cast<std::size_t>(m)] = media.handling_time(per) + media.handling_time(m);
    if (!first_ok && h[static_cast<std::size_t>(m)] < bound && media.vm_memory(per) <= largest_capacity) first_ok = m;
    if (!first_rise && m >= 2 && h[static_cast<std::size_t>(m - 1)] < h[static_cast<std::size_t>(m)]) first_rise = m;
  }
  MixerScan out;
  out.feasible = first_ok != 0 && (first_rise == 0 || first_ok < first_rise);
  if (out.feasible) {
    out.min_mixer = first_ok;
    out.max_user = (users + first_ok - 1) / first_ok;
  }
  return out;
}

}  // namespace cram::testing

#endif  // CRAM_TESTS_SUPPORT_HPP_
