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

#include "cram/validate.hpp"

#include <cmath>
#include <sstream>

#include "cram/evaluate.hpp"
#include "cram/graph.hpp"

namespace cram {
namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << x;
  return os.str();
}

std::string name(const Instance& instance, const Endpoint& e) {
  return e.is_participant() ? "participant '" + instance.participants()[e.index].id + "'"
                            : "vm " + std::to_string(e.index);
}

}  // namespace

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::kStructure: return "structure";
    case Constraint::kParticipantOutDegree: return "participant-out-degree";
    case Constraint::kParticipantInDegree: return "participant-in-degree";
    case Constraint::kParticipantToParticipant: return "participant-to-participant";
    case Constraint::kIncompleteFinalStream: return "incomplete-final-stream";
    case Constraint::kCompressorBalance: return "compressor-balance";
    case Constraint::kCompressorToCompressor: return "compressor-to-compressor";
    case Constraint::kNoCompleteMixer: return "no-complete-mixer";
    case Constraint::kVmPlacement: return "vm-placement";
    case Constraint::kUnreachedVm: return "unreached-vm";
    case Constraint::kInputCount: return "input-count";
    case Constraint::kCompressionRate: return "compression-rate";
    case Constraint::kCapacity: return "capacity";
    case Constraint::kDelay: return "delay";
  }
  return "unknown";
}

std::vector<Violation> validate_plan(const Plan& plan, const Instance& instance,
                                     DelayModel model) {
  std::vector<Violation> out;
  auto add = [&](Constraint c, std::string msg) { out.push_back({c, std::move(msg)}); };

  try {
    check_references(plan, instance);
  } catch (const StructuralError& e) {
    add(Constraint::kStructure, e.what());
    return out;
  }
  const StreamGraph g(plan, instance);
  const std::size_t users = instance.participant_count();
  const MediaCostModel& media = instance.media();
  const double bound = instance.qos().max_delay_ms;

  bool degrees_ok = true;
  for (std::size_t u = 0; u < users; ++u) {
    const std::string who = name(instance, Endpoint::participant(u));
    if (g.out_edges(u).size() != 1) {
      degrees_ok = false;
      add(Constraint::kParticipantOutDegree,
          who + " sends " + std::to_string(g.out_edges(u).size()) + " streams");
    }
    if (g.in_edges(u).size() != 1) {
      degrees_ok = false;
      add(Constraint::kParticipantInDegree,
          who + " receives " + std::to_string(g.in_edges(u).size()) + " streams");
    }
  }

  for (const StreamEdge& e : plan.edges) {
    const std::string link = name(instance, e.head) + " -> " + name(instance, e.tail);
    if (e.head.is_participant() && e.tail.is_participant()) {
      degrees_ok = false;
      add(Constraint::kParticipantToParticipant, link);
    }
    const bool head_c = e.head.is_vm() && plan.vms[e.head.index].is_compressor();
    const bool tail_c = e.tail.is_vm() && plan.vms[e.tail.index].is_compressor();
    if (head_c && tail_c) add(Constraint::kCompressorToCompressor, link);
    if (head_c) {
      if (e.compression_rate < 0.0 || e.compression_rate > media.max_compression_rate + kTolerance)
        add(Constraint::kCompressionRate, link + " rate " + fmt(e.compression_rate));
    } else if (std::abs(e.compression_rate) > kTolerance) {
      add(Constraint::kCompressionRate, link + " carries a rate but its head is no compressor");
    }
  }

  for (std::size_t v = 0; v < plan.vms.size(); ++v) {
    const VmInstance& vm = plan.vms[v];
    const std::size_t node = users + v;
    const std::size_t in = g.in_edges(node).size();
    const std::size_t outd = g.out_edges(node).size();
    const std::string who = "vm " + std::to_string(v);
    if (in == 0) add(Constraint::kVmPlacement, who + " has no input stream");
    if (outd == 0) add(Constraint::kVmPlacement, who + " has no output stream");
    if (vm.is_compressor() && in != outd)
      add(Constraint::kCompressorBalance, who + " has " + std::to_string(in) + " inputs and " +
                                              std::to_string(outd) + " outputs");
    if (vm.input_count != static_cast<int>(in))
      add(Constraint::kInputCount, who + " records " + std::to_string(vm.input_count) +
                                       " inputs but receives " + std::to_string(in));
  }
  if (model == DelayModel::kIlp) {
    if (plan.mixer_count() > users - 1)
      add(Constraint::kVmPlacement, "more than " + std::to_string(users - 1) + " mixers");
    if (plan.compressor_count() > 2 * users - 1)
      add(Constraint::kVmPlacement, "more than " + std::to_string(2 * users - 1) + " compressors");
  }

  const Eigen::MatrixXi reach = reachability_closure(g.participant_to_vm(), g.vm_to_vm());
  std::vector<char> complete(plan.vms.size(), 0);
  bool any_complete_mixer = false;
  for (std::size_t v = 0; v < plan.vms.size(); ++v) {
    const int reached_by = reach.col(static_cast<Eigen::Index>(v)).sum();
    complete[v] = reached_by == static_cast<int>(users);
    if (reached_by == 0) add(Constraint::kUnreachedVm, "vm " + std::to_string(v));
    if (complete[v] && plan.vms[v].is_mixer()) any_complete_mixer = true;
  }
  if (!any_complete_mixer)
    add(Constraint::kNoCompleteMixer, "no mixer receives streams from every participant");
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t e : g.in_edges(u)) {
      const Endpoint& h = plan.edges[e].head;
      if (h.is_vm() && !complete[h.index])
        add(Constraint::kIncompleteFinalStream,
            name(instance, Endpoint::participant(u)) + " receives from vm " +
                std::to_string(h.index) + " which lacks some participant's stream");
    }

  std::vector<double> used(instance.server_count(), 0.0);
  for (const VmInstance& vm : plan.vms) used[vm.server] += media.vm_memory(vm.input_count);
  for (std::size_t s = 0; s < used.size(); ++s)
    if (used[s] > instance.servers()[s].capacity_mb + kTolerance)
      add(Constraint::kCapacity, "server " + std::to_string(s) + " holds " + fmt(used[s]) +
                                     " MB of " + fmt(instance.servers()[s].capacity_mb));

  if (degrees_ok) {
    try {
      std::vector<double> delay;
      if (model == DelayModel::kForkJoin) {
        const ForkJoinTimes fj = eval_fork_join(plan, instance);
        for (std::size_t s : fj.mixer_servers)
          if (fj.mix_time[s] > bound + kTolerance)
            add(Constraint::kDelay, "server " + std::to_string(s) + " mixes in " +
                                        fmt(fj.mix_time[s]) + " ms");
        delay = fj.delay;
      } else {
        delay = eval_delays(plan, instance, DelayModel::kIlp);
      }
      for (std::size_t u = 0; u < users; ++u)
        if (delay[u] > bound + kTolerance)
          add(Constraint::kDelay, name(instance, Endpoint::participant(u)) + " waits " +
                                      fmt(delay[u]) + " ms");
    } catch (const StructuralError& e) {
      add(Constraint::kStructure, e.what());
    }
  }
  return out;
}

std::vector<Violation> validate_plan(const Plan& plan, const Instance& instance) {
  return validate_plan(plan, instance, plan.delay_model);
}

IlpArtifacts build_ilp_artifacts(const Plan& plan, const Instance& instance) {
  const StreamGraph g(plan, instance);
  const int users = static_cast<int>(instance.participant_count());
  const int servers = static_cast<int>(instance.server_count());
  const int mixer_slots = users - 1;
  const int compressor_slots = 2 * users - 1;
  const int vm_slots = mixer_slots + compressor_slots;
  const int nodes = users + vm_slots;

  IlpArtifacts a;
  a.slot_of_vm.resize(plan.vms.size());
  int next_mixer = 0;
  int next_compressor = mixer_slots;
  for (std::size_t v = 0; v < plan.vms.size(); ++v) {
    if (plan.vms[v].is_mixer()) {
      if (next_mixer >= mixer_slots) throw StructuralError("plan has more mixers than slots");
      a.slot_of_vm[v] = next_mixer++;
    } else {
      if (next_compressor >= vm_slots) throw StructuralError("plan has more compressors than slots");
      a.slot_of_vm[v] = next_compressor++;
    }
  }
  auto node = [&](const Endpoint& e) {
    return e.is_participant() ? static_cast<int>(e.index) : users + a.slot_of_vm[e.index];
  };

  a.D = Eigen::MatrixXi::Zero(nodes, nodes);
  for (const StreamEdge& e : plan.edges) {
    int& cell = a.D(node(e.head), node(e.tail));
    if (cell) throw StructuralError("repeated stream between one pair of nodes");
    cell = 1;
  }

  const Eigen::MatrixXi d_uv = a.D.block(0, users, users, vm_slots);
  const Eigen::SparseMatrix<int> d_vv = a.D.block(users, users, vm_slots, vm_slots).sparseView();
  a.E = reachability_closure(d_uv, d_vv);

  a.F.assign(static_cast<std::size_t>(users), Eigen::MatrixXi::Zero(vm_slots, vm_slots));
  for (int u = 0; u < users; ++u)
    for (int i = 0; i < vm_slots; ++i)
      if (a.E(u, i))
        for (int v = 0; v < vm_slots; ++v) a.F[u](i, v) = a.D(users + i, users + v);

  a.X = Eigen::MatrixXi::Zero(servers, vm_slots);
  for (std::size_t v = 0; v < plan.vms.size(); ++v)
    a.X(static_cast<int>(plan.vms[v].server), a.slot_of_vm[v]) = 1;
  a.G = a.D.block(0, users, nodes, vm_slots).colwise().sum().transpose();
  a.Z = a.X * a.G.asDiagonal();

  a.Y = Eigen::MatrixXd::Zero(users, vm_slots);
  for (int u = 0; u < users; ++u) {
    const std::vector<double> y = ilp_arrival_times(plan, instance, static_cast<std::size_t>(u));
    for (std::size_t v = 0; v < plan.vms.size(); ++v)
      if (y[v] >= 0.0) a.Y(u, a.slot_of_vm[v]) = y[v];
  }
  a.beta = users + vm_slots + 1;
  return a;
}

}  // namespace cram
