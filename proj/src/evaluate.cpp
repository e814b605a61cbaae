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

#include "cram/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "cram/graph.hpp"

namespace cram {
namespace {

std::string vm_name(std::size_t v) { return "vm " + std::to_string(v); }
std::string participant_name(const Instance& instance, std::size_t u) {
  return "participant '" + instance.participants()[u].id + "'";
}

double edge_time(const StreamEdge& e, const Plan& plan, const Instance& instance) {
  return instance.network().time(site_of(e.head, plan, instance), site_of(e.tail, plan, instance)) *
         (1.0 - e.compression_rate);
}

}  // namespace

double eval_server_cost(const Plan& plan, const Instance& instance) {
  check_references(plan, instance);
  double cost = 0.0;
  for (const VmInstance& vm : plan.vms) {
    const ServerSpec& s = instance.servers()[vm.server];
    cost += instance.cost_mode() == CostMode::kPerMb
                ? instance.media().vm_memory(vm.input_count) * s.cost_per_mb
                : s.cost_per_mb;
  }
  return cost;
}

double eval_network_cost(const Plan& plan, const Instance& instance) {
  double cost = 0.0;
  for (const StreamEdge& e : plan.edges)
    cost += instance.network().cost(site_of(e.head, plan, instance),
                                    site_of(e.tail, plan, instance)) *
            (1.0 - e.compression_rate);
  return cost;
}

double allocated_memory(const Plan& plan, const Instance& instance) {
  check_references(plan, instance);
  double mb = 0.0;
  for (const VmInstance& vm : plan.vms) mb += instance.media().vm_memory(vm.input_count);
  return mb;
}

ForkJoinTimes eval_fork_join(const Plan& plan, const Instance& instance) {
  const StreamGraph g(plan, instance);
  const MediaCostModel& media = instance.media();
  const std::size_t servers = instance.server_count();

  std::vector<std::vector<std::size_t>> mixers_on(servers);
  for (std::size_t v = 0; v < plan.vms.size(); ++v)
    if (plan.vms[v].is_mixer()) mixers_on[plan.vms[v].server].push_back(v);

  ForkJoinTimes out;
  out.mix_time.assign(servers, 0.0);
  for (std::size_t s = 0; s < servers; ++s)
    if (!mixers_on[s].empty()) out.mixer_servers.push_back(s);
  const double used = static_cast<double>(out.mixer_servers.size());

  auto vm_node = [&](std::size_t v) { return g.participant_count() + v; };
  auto participant_fed = [&](std::size_t c) {
    bool from_participant = false;
    bool from_vm = false;
    for (std::size_t e : g.in_edges(vm_node(c)))
      (plan.edges[e].head.is_participant() ? from_participant : from_vm) = true;
    if (from_participant && from_vm)
      throw StructuralError(vm_name(c) + " compresses both participant and mixer streams");
    return from_participant;
  };

  // Partial mix load per server: the busiest mixer's participant-side inputs.
  std::vector<double>& base = out.base;
  base.assign(servers, 0.0);
  for (std::size_t s : out.mixer_servers) {
    int load = 0;
    for (std::size_t m : mixers_on[s]) {
      int inputs = 0;
      for (std::size_t e : g.in_edges(vm_node(m))) {
        const Endpoint& h = plan.edges[e].head;
        if (h.is_participant() || (plan.vms[h.index].is_compressor() && participant_fed(h.index)))
          ++inputs;
      }
      load = std::max(load, inputs);
    }
    base[s] = media.handling_time(load) +
              media.handling_time(static_cast<double>(mixers_on[s].size())) +
              media.handling_time(used);
  }

  // Join: slowest stream from a mixer on j to a mixer on each other server n.
  for (std::size_t j : out.mixer_servers) {
    double join = 0.0;
    for (std::size_t n : out.mixer_servers) {
      if (n == j) continue;
      double slowest = -1.0;
      for (std::size_t m : mixers_on[j]) {
        for (std::size_t e : g.out_edges(vm_node(m))) {
          const StreamEdge& first = plan.edges[e];
          if (!first.tail.is_vm()) continue;
          const VmInstance& next = plan.vms[first.tail.index];
          if (next.is_mixer()) {
            if (next.server == n) slowest = std::max(slowest, edge_time(first, plan, instance));
            continue;
          }
          for (std::size_t e2 : g.out_edges(vm_node(first.tail.index))) {
            const StreamEdge& second = plan.edges[e2];
            if (!second.tail.is_vm()) continue;
            const VmInstance& dest = plan.vms[second.tail.index];
            if (!dest.is_mixer() || dest.server != n) continue;
            const double t = edge_time(first, plan, instance) +
                             media.handling_time(g.in_edges(vm_node(first.tail.index)).size()) +
                             edge_time(second, plan, instance);
            slowest = std::max(slowest, t);
          }
        }
      }
      if (slowest < 0.0)
        throw StructuralError("no join stream from server " + std::to_string(j) + " to server " +
                              std::to_string(n));
      join = std::max(join, slowest);
    }
    out.mix_time[j] = base[j] + join;
  }

  out.delay.assign(instance.participant_count(), 0.0);
  for (std::size_t u = 0; u < instance.participant_count(); ++u) {
    const auto& outs = g.out_edges(u);
    const auto& ins = g.in_edges(u);
    if (outs.size() != 1 || ins.size() != 1)
      throw StructuralError(participant_name(instance, u) + " needs exactly one outgoing and one "
                            "incoming stream");
    const StreamEdge& up = plan.edges[outs.front()];
    const StreamEdge& down = plan.edges[ins.front()];
    if (!up.tail.is_vm() || !down.head.is_vm())
      throw StructuralError(participant_name(instance, u) + " is linked to another participant");

    double upstream = -1.0;
    std::size_t entry = 0;
    const VmInstance& first = plan.vms[up.tail.index];
    if (first.is_mixer()) {
      upstream = edge_time(up, plan, instance);
      entry = first.server;
    } else {
      const double handling = media.handling_time(g.in_edges(vm_node(up.tail.index)).size());
      for (std::size_t e : g.out_edges(vm_node(up.tail.index))) {
        const StreamEdge& hop = plan.edges[e];
        if (!hop.tail.is_vm() || !plan.vms[hop.tail.index].is_mixer()) continue;
        const std::size_t s = plan.vms[hop.tail.index].server;
        if (upstream >= 0.0 && s != entry)
          throw StructuralError(vm_name(up.tail.index) + " forwards to mixers on several servers");
        entry = s;
        upstream = std::max(upstream, edge_time(up, plan, instance) + handling +
                                          edge_time(hop, plan, instance));
      }
    }
    if (upstream < 0.0)
      throw StructuralError(participant_name(instance, u) + " has no stream path to a mixer");

    double downstream = -1.0;
    std::size_t source = 0;
    const VmInstance& last = plan.vms[down.head.index];
    if (last.is_mixer()) {
      downstream = edge_time(down, plan, instance);
      source = last.server;
    } else {
      const double handling = media.handling_time(g.in_edges(vm_node(down.head.index)).size());
      for (std::size_t e : g.in_edges(vm_node(down.head.index))) {
        const StreamEdge& hop = plan.edges[e];
        if (!hop.head.is_vm() || !plan.vms[hop.head.index].is_mixer()) continue;
        const double t = edge_time(hop, plan, instance) + handling + edge_time(down, plan, instance);
        if (t > downstream) {
          downstream = t;
          source = plan.vms[hop.head.index].server;
        }
      }
    }
    if (downstream < 0.0)
      throw StructuralError(participant_name(instance, u) + " receives no mixed stream");

    out.delay[u] = upstream + std::max(out.mix_time[entry], out.mix_time[source]) + downstream;
  }
  return out;
}

std::vector<double> ilp_arrival_times(const Plan& plan, const Instance& instance,
                                      std::size_t participant) {
  const StreamGraph g(plan, instance);
  const MediaCostModel& media = instance.media();
  const std::size_t vms = plan.vms.size();
  const std::size_t base = g.participant_count();

  // VMs reachable from the participant.
  std::vector<char> reached(vms, 0);
  std::vector<std::size_t> stack;
  for (std::size_t e : g.out_edges(participant)) {
    const Endpoint& t = plan.edges[e].tail;
    if (t.is_vm() && !reached[t.index]) {
      reached[t.index] = 1;
      stack.push_back(t.index);
    }
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t e : g.out_edges(base + v)) {
      const Endpoint& t = plan.edges[e].tail;
      if (t.is_vm() && !reached[t.index]) {
        reached[t.index] = 1;
        stack.push_back(t.index);
      }
    }
  }

  // Longest arrival over the reachable sub-DAG, iterative post-order.
  std::vector<double> y(vms, -1.0);
  std::vector<char> state(vms, 0);  // 0 new, 1 open, 2 done
  for (std::size_t root = 0; root < vms; ++root) {
    if (!reached[root] || state[root] == 2) continue;
    std::vector<std::pair<std::size_t, bool>> work{{root, false}};
    while (!work.empty()) {
      auto [v, expanded] = work.back();
      work.pop_back();
      if (expanded) {
        double arrival = 0.0;
        for (std::size_t e : g.in_edges(base + v)) {
          const StreamEdge& in = plan.edges[e];
          double start;
          if (in.head.is_participant()) {
            if (in.head.index != participant) continue;
            start = 0.0;
          } else {
            if (!reached[in.head.index]) continue;
            start = y[in.head.index];
          }
          arrival = std::max(arrival, start + edge_time(in, plan, instance));
        }
        y[v] = arrival + media.handling_time(static_cast<double>(g.in_edges(base + v).size()));
        state[v] = 2;
        continue;
      }
      if (state[v] == 2) continue;
      if (state[v] == 1)
        throw StructuralError("stream cycle through " + vm_name(v) + " reachable from " +
                              participant_name(instance, participant));
      state[v] = 1;
      work.push_back({v, true});
      for (std::size_t e : g.in_edges(base + v)) {
        const Endpoint& h = plan.edges[e].head;
        if (!h.is_vm() || !reached[h.index]) continue;
        if (state[h.index] == 1)
          throw StructuralError("stream cycle through " + vm_name(h.index) + " reachable from " +
                                participant_name(instance, participant));
        if (state[h.index] == 0) work.push_back({h.index, false});
      }
    }
  }
  return y;
}

std::vector<double> eval_delays(const Plan& plan, const Instance& instance, DelayModel model) {
  if (model == DelayModel::kForkJoin) return eval_fork_join(plan, instance).delay;
  const StreamGraph g(plan, instance);
  std::vector<double> delay(instance.participant_count(), 0.0);
  for (std::size_t u = 0; u < instance.participant_count(); ++u) {
    const auto& ins = g.in_edges(u);
    if (g.out_edges(u).size() != 1 || ins.size() != 1)
      throw StructuralError(participant_name(instance, u) + " needs exactly one outgoing and one "
                            "incoming stream");
    const StreamEdge& down = plan.edges[ins.front()];
    if (!down.head.is_vm())
      throw StructuralError(participant_name(instance, u) + " is linked to another participant");
    const std::vector<double> y = ilp_arrival_times(plan, instance, u);
    if (y[down.head.index] < 0.0)
      throw StructuralError(participant_name(instance, u) + " does not reach " +
                            vm_name(down.head.index));
    delay[u] = y[down.head.index] + edge_time(down, plan, instance);
  }
  return delay;
}

std::vector<double> eval_delays(const Plan& plan, const Instance& instance) {
  return eval_delays(plan, instance, plan.delay_model);
}

PlanMetrics metrics(const Plan& plan, const Instance& instance, DelayModel model) {
  PlanMetrics m;
  if (plan.vms.empty() && plan.edges.empty()) return m;
  m.server_cost = eval_server_cost(plan, instance);
  m.network_cost = eval_network_cost(plan, instance);
  m.total_cost = m.server_cost + m.network_cost;
  const std::vector<double> delays = eval_delays(plan, instance, model);
  m.max_delay = delays.empty() ? 0.0 : *std::max_element(delays.begin(), delays.end());
  for (const StreamEdge& e : plan.edges)
    if (e.head.is_vm() && plan.vms[e.head.index].is_compressor())
      m.compression_rates.push_back(e.compression_rate);
  m.vm_count = static_cast<int>(plan.vms.size());
  m.allocated_memory = allocated_memory(plan, instance);
  return m;
}

PlanMetrics metrics(const Plan& plan, const Instance& instance) {
  return metrics(plan, instance, plan.delay_model);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace cram
