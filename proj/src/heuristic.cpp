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

#include "cram/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cram/evaluate.hpp"
#include "cram/graph.hpp"

namespace cram {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << x;
  return os.str();
}

/// Server-side price of adding one compressed stream on server s.
double compressor_price(const Instance& instance, std::size_t s, bool new_vm) {
  const MediaCostModel& media = instance.media();
  const double p = instance.servers()[s].cost_per_mb;
  if (instance.cost_mode() == CostMode::kPerVm) return new_vm ? p : 0.0;
  return (new_vm ? media.vm_memory(1) : media.resources(1)) * p;
}

/// Smallest rate that lets a stream with `remaining` ms left cover `hop` ms.
double minimal_rate(double hop, double remaining) {
  if (hop <= 0.0) return remaining >= -kTolerance ? 0.0 : kInf;
  return std::max(0.0, 1.0 - remaining / hop);
}

}  // namespace

AllocationState::AllocationState(const Instance& instance)
    : mixers_per_server(instance.server_count()),
      compressors_per_server(instance.server_count()),
      mix_time_per_server(instance.server_count(), 0.0) {
  for (const ServerSpec& s : instance.servers()) remaining_capacity.push_back(s.capacity_mb);
}

MinMixers min_mixers(const Instance& instance) {
  const MediaCostModel& media = instance.media();
  const int users = static_cast<int>(instance.participant_count());
  const double bound = instance.qos().max_delay_ms;
  double largest = 0.0;
  for (const ServerSpec& s : instance.servers()) largest = std::max(largest, s.capacity_mb);

  double handling = kInf;
  int m = 0;
  int max_user = 0;
  for (;;) {
    ++m;
    max_user = (users + m - 1) / m;
    const double next = media.handling_time(max_user) + media.handling_time(m);
    if (handling < next)
      throw InfeasibleError("min_mixers",
                            "handling time rises from " + fmt(handling) + " to " + fmt(next) +
                                " ms at " + std::to_string(m) + " mixers",
                            handling);
    handling = next;
    if (handling < bound && media.vm_memory(max_user) <= largest) break;
    if (m >= users - 1)
      throw InfeasibleError("min_mixers",
                            "no mixer count up to " + std::to_string(users - 1) +
                                " meets the delay bound and server capacity",
                            handling);
  }
  return {m, max_user, handling};
}

std::vector<std::size_t> dsort(const std::vector<ServerSpec>& servers,
                               const std::vector<Participant>& participants,
                               const NetworkMatrix& network) {
  std::vector<double> total(servers.size(), 0.0);
  for (std::size_t s = 0; s < servers.size(); ++s)
    for (const Participant& p : participants) total[s] += network.time(servers[s].site, p.site);
  std::vector<std::size_t> order(servers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return total[a] < total[b]; });
  return order;
}

CompressOutcome compress(const Sender& sender, std::size_t dest_server, std::size_t dest_vm,
                         double t, AllocationState& state, const Instance& instance) {
  const NetworkMatrix& net = instance.network();
  const MediaCostModel& media = instance.media();
  const std::size_t a = sender.kind == SenderKind::kParticipant
                            ? instance.participant_site(sender.index)
                            : instance.server_site(sender.index);
  const std::size_t b = instance.server_site(dest_server);
  const double budget = net.time(a, b) - t;
  const double max_distance = budget - media.handling_time(1);
  const double keep = 1.0 - media.max_compression_rate;

  double best_cost = kInf;
  std::size_t best_server = 0;
  std::optional<std::size_t> best_slot;
  for (std::size_t s = 0; s < instance.server_count(); ++s) {
    const std::size_t c = instance.server_site(s);
    if (!(net.time(a, c) < max_distance && state.remaining_capacity[s] > media.resources(1)))
      continue;

    std::optional<std::size_t> shared;
    const auto& pool = state.compressors_per_server[s];
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (pool[k].dest_server != dest_server || pool[k].kind != sender.kind) continue;
      if (!shared || pool[k].streams.size() < pool[*shared].streams.size()) shared = k;
    }
    bool reuse = false;
    if (shared) {
      const CompressorSlot& slot = pool[*shared];
      const double handling = media.handling_time(static_cast<double>(slot.streams.size() + 1));
      reuse = handling + net.time(a, c) + net.time(c, b) * keep <= budget + kTolerance;
      for (const CompressedStream& st : slot.streams)
        reuse = reuse &&
                net.time(st.sender_site, c) + handling + net.time(c, b) * keep <= st.budget_ms + kTolerance;
    }
    double cost;
    if (reuse) {
      cost = net.cost(a, c) + compressor_price(instance, s, false);
    } else {
      if (state.remaining_capacity[s] < media.vm_memory(1)) continue;
      if (media.handling_time(1) + net.time(a, c) + net.time(c, b) * keep > budget + kTolerance)
        continue;
      cost = net.cost(a, c) + compressor_price(instance, s, true);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_server = s;
      best_slot = reuse ? shared : std::nullopt;
    }
  }
  if (best_cost == kInf)
    throw InfeasibleError("compress", "no server can compress the stream from site " +
                                          net.sites()[a].name + " to " + net.sites()[b].name +
                                          " by " + fmt(t) + " ms");

  CompressOutcome out;
  out.chosen_server = best_server;
  auto& pool = state.compressors_per_server[best_server];
  if (best_slot) {
    state.remaining_capacity[best_server] -= media.resources(1);
  } else {
    state.remaining_capacity[best_server] -= media.vm_memory(1);
    pool.push_back({state.vms.size(), dest_server, sender.kind, {}});
    state.vms.push_back({VmKind::kCompressor, best_server, 0});
    best_slot = pool.size() - 1;
    out.new_vm_created = true;
  }
  CompressorSlot& slot = pool[*best_slot];
  slot.streams.push_back({a, budget});
  out.compressor_vm = slot.vm;

  const std::size_t c = instance.server_site(best_server);
  const double new_t = budget - net.time(a, c) -
                       media.handling_time(static_cast<double>(slot.streams.size()));
  out.real_rate = minimal_rate(net.time(c, b), new_t);
  if (out.real_rate > media.max_compression_rate + kTolerance)
    throw InfeasibleError("compress", "required compression rate " + fmt(out.real_rate) +
                                          " exceeds the maximum");

  const Endpoint from = sender.kind == SenderKind::kParticipant
                            ? Endpoint::participant(sender.index)
                            : Endpoint::vm(state.lead(sender.index));
  out.edges_added = {{from, Endpoint::vm(slot.vm), 0.0},
                     {Endpoint::vm(slot.vm), Endpoint::vm(dest_vm), out.real_rate}};
  state.edges.insert(state.edges.end(), out.edges_added.begin(), out.edges_added.end());
  return out;
}

AcsChoice acs(std::size_t participant, AllocationState& state, const Instance& instance) {
  const std::size_t site = instance.participant_site(participant);
  std::optional<std::size_t> chosen;
  double nearest = kInf;
  for (std::size_t s : state.order) {
    const auto& mixers = state.mixers_per_server[s];
    const bool open = std::any_of(mixers.begin(), mixers.end(), [&](const MixerSlot& m) {
      return m.participants < state.max_user;
    });
    if (!open) continue;
    const double d = instance.network().time(site, instance.server_site(s));
    if (d < nearest) {
      nearest = d;
      chosen = s;
    }
  }
  if (!chosen)
    throw InfeasibleError("assign_participants",
                          "every mixer already serves " + std::to_string(state.max_user) +
                              " participants");
  auto& mixers = state.mixers_per_server[*chosen];
  auto least = std::min_element(mixers.begin(), mixers.end(),
                                [](const MixerSlot& x, const MixerSlot& y) {
                                  return x.participants < y.participants;
                                });
  ++least->participants;
  return {*chosen, least->vm};
}

void place_mixers(AllocationState& state, const Instance& instance) {
  const MediaCostModel& media = instance.media();
  const double need = media.vm_memory(state.max_user);
  int placed = 0;
  std::size_t i = 0;
  do {
    const std::size_t s = state.order[i++];
    while (state.remaining_capacity[s] >= need && placed < state.min_mixer) {
      state.mixers_per_server[s].push_back({state.vms.size(), 0});
      state.vms.push_back({VmKind::kMixer, s, 0});
      state.remaining_capacity[s] -= need;
      ++placed;
    }
    if (i == state.order.size() && placed < state.min_mixer)
      throw InfeasibleError("place_mixers", "servers can host only " + std::to_string(placed) +
                                                " of " + std::to_string(state.min_mixer) +
                                                " mixers");
  } while (placed < state.min_mixer);

  for (std::size_t s : state.order)
    if (!state.mixers_per_server[s].empty()) state.used_servers.push_back(s);

  // The lead mixer also receives the other local mixers and one join stream
  // from every other used server.
  const int used = static_cast<int>(state.used_servers.size());
  for (std::size_t s : state.used_servers) {
    const int joins = static_cast<int>(state.mixers_per_server[s].size()) - 1 + used - 1;
    if (state.remaining_capacity[s] < media.resources(joins))
      throw InfeasibleError("place_mixers", "server " + std::to_string(s) +
                                                " lacks memory for its join streams");
    state.remaining_capacity[s] -= media.resources(joins);
  }
}

void inter_mixer_compress(AllocationState& state, const Instance& instance) {
  const MediaCostModel& media = instance.media();
  const double bound = instance.qos().max_delay_ms;
  const double used = static_cast<double>(state.used_servers.size());
  for (std::size_t j : state.used_servers) {
    const double base = media.handling_time(state.max_user) +
                        media.handling_time(static_cast<double>(state.mixers_per_server[j].size())) +
                        media.handling_time(used);
    double mix = 0.0;
    for (std::size_t n : state.used_servers) {
      double total =
          base + instance.network().time(instance.server_site(j), instance.server_site(n));
      if (n != j) {
        if (total >= bound) {
          try {
            compress({SenderKind::kServer, j}, n, state.lead(n), total - bound, state, instance);
          } catch (const InfeasibleError& e) {
            throw InfeasibleError("inter_mixer_compress", e.reason());
          }
          total = bound;
        } else {
          state.edges.push_back({Endpoint::vm(state.lead(j)), Endpoint::vm(state.lead(n)), 0.0});
        }
      }
      mix = std::max(mix, total);
    }
    state.mix_time_per_server[j] = mix;
  }
}

namespace {

/// Lowest rate per compressor that keeps every stream through it on time,
/// given the final loads.
void set_minimal_rates(Plan& plan, const Instance& instance) {
  const NetworkMatrix& net = instance.network();
  const MediaCostModel& media = instance.media();
  const double bound = instance.qos().max_delay_ms;
  const StreamGraph g(plan, instance);
  const std::size_t users = instance.participant_count();

  auto apply = [&](bool participant_side, const ForkJoinTimes& fj) {
    for (std::size_t c = 0; c < plan.vms.size(); ++c) {
      if (!plan.vms[c].is_compressor()) continue;
      const auto& ins = g.in_edges(users + c);
      const auto& outs = g.out_edges(users + c);
      if (ins.empty() || outs.empty()) continue;
      if (plan.edges[ins.front()].head.is_participant() != participant_side) continue;
      const std::size_t site = instance.server_site(plan.vms[c].server);
      const std::size_t dest = plan.vms[plan.edges[outs.front()].tail.index].server;
      const double hop = net.time(site, instance.server_site(dest));
      const double handling = media.handling_time(static_cast<double>(ins.size()));
      double rate = 0.0;
      for (std::size_t e : ins) {
        const Endpoint& h = plan.edges[e].head;
        double remaining;
        if (participant_side) {
          const std::size_t u = h.index;
          remaining = bound - fj.mix_time[dest] -
                      net.time(instance.server_site(dest), instance.participant_site(u)) -
                      net.time(instance.participant_site(u), site) - handling;
        } else {
          const std::size_t j = plan.vms[h.index].server;
          remaining = bound - fj.base[j] - net.time(instance.server_site(j), site) - handling;
        }
        rate = std::max(rate, minimal_rate(hop, remaining));
      }
      if (rate > media.max_compression_rate + kTolerance)
        throw InfeasibleError(participant_side ? "assign_participants" : "inter_mixer_compress",
                              "vm " + std::to_string(c) + " needs compression rate " + fmt(rate));
      for (std::size_t e : outs) plan.edges[e].compression_rate = rate;
    }
  };
  for (StreamEdge& e : plan.edges) e.compression_rate = 0.0;
  apply(false, eval_fork_join(plan, instance));
  apply(true, eval_fork_join(plan, instance));
}

}  // namespace

Plan assign_participants(AllocationState& state, const Instance& instance) {
  const double bound = instance.qos().max_delay_ms;
  for (std::size_t u = 0; u < instance.participant_count(); ++u) {
    const AcsChoice choice = acs(u, state, instance);
    const double rtt =
        2.0 * instance.network().time(instance.participant_site(u), instance.server_site(choice.server));
    const double total = state.mix_time_per_server[choice.server] + rtt;
    if (total <= bound) {
      state.edges.push_back({Endpoint::participant(u), Endpoint::vm(choice.mixer_vm), 0.0});
    } else {
      try {
        compress({SenderKind::kParticipant, u}, choice.server, choice.mixer_vm, total - bound, state,
                 instance);
      } catch (const InfeasibleError& e) {
        throw InfeasibleError("assign_participants", e.reason());
      }
    }
    state.edges.push_back({Endpoint::vm(state.lead(choice.server)), Endpoint::participant(u), 0.0});
  }

  // Secondary mixers forward their partial mix to the lead; idle ones are dropped.
  std::vector<char> keep(state.vms.size(), 1);
  for (std::size_t s : state.used_servers) {
    const auto& mixers = state.mixers_per_server[s];
    for (std::size_t k = 1; k < mixers.size(); ++k) {
      if (mixers[k].participants == 0)
        keep[mixers[k].vm] = 0;
      else
        state.edges.push_back({Endpoint::vm(mixers[k].vm), Endpoint::vm(mixers.front().vm), 0.0});
    }
  }

  Plan plan;
  std::vector<std::size_t> remap(state.vms.size());
  for (std::size_t v = 0; v < state.vms.size(); ++v) {
    if (!keep[v]) continue;
    remap[v] = plan.vms.size();
    plan.vms.push_back(state.vms[v]);
  }
  auto map = [&](Endpoint e) { return e.is_vm() ? Endpoint::vm(remap[e.index]) : e; };
  for (const StreamEdge& e : state.edges) {
    plan.edges.push_back({map(e.head), map(e.tail), e.compression_rate});
    if (e.tail.is_vm()) ++plan.vms[remap[e.tail.index]].input_count;
  }
  plan.delay_model = DelayModel::kForkJoin;

  set_minimal_rates(plan, instance);
  plan.per_participant_delay = eval_fork_join(plan, instance).delay;
  plan.feasible = true;
  return plan;
}

Plan cram_allocate(const Instance& instance) {
  AllocationState state(instance);
  const MinMixers mm = min_mixers(instance);
  state.min_mixer = mm.min_mixer;
  state.max_user = mm.max_user;
  state.order = dsort(instance.servers(), instance.participants(), instance.network());
  place_mixers(state, instance);
  inter_mixer_compress(state, instance);
  return assign_participants(state, instance);
}

}  // namespace cram
