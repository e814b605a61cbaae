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

#include "cram/exact.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <utility>

namespace cram {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Mask = std::uint32_t;

Mask bit(std::size_t i) { return Mask{1} << i; }

/// Depth-first branch and bound over, in order: the VM count, the multiset of
/// (kind, server) labels, the VM-to-VM stream edges, each participant's
/// upstream VM and each participant's downstream VM. Cost is additive over
/// VMs and edges, which gives the lower bounds used for pruning.
class Search {
 public:
  Search(const Instance& instance, const SearchBounds& bounds)
      : in_(instance),
        bounds_(bounds),
        users_(instance.participant_count()),
        servers_(instance.server_count()),
        keep_(1.0 - instance.media().gamma_rate()),
        per_mb_(instance.cost_mode() == CostMode::kPerMb) {
    const int compressor_slots = 2 * static_cast<int>(users_) - 1;
    max_compressors_ = bounds.max_compressors < 0 ? compressor_slots
                                                   : std::min(bounds.max_compressors, compressor_slots);
    max_mixers_ = static_cast<int>(users_) - 1;
    for (std::size_t u = 0; u < users_; ++u) {
      prev_same_site_.push_back(-1);
      for (std::size_t w = u; w-- > 0;)
        if (in_.participant_site(w) == in_.participant_site(u)) {
          prev_same_site_.back() = static_cast<int>(w);
          break;
        }
    }
  }

  Plan run(ExactStats* stats) {
    const MediaCostModel& media = in_.media();
    if (in_.qos().max_delay_ms + kTolerance < media.handling_time(2))
      throw InfeasibleError("exact", "the delay bound is below the time to mix two streams");

    double min_fixed = kInf;
    for (std::size_t s = 0; s < servers_; ++s) min_fixed = std::min(min_fixed, fixed_cost(s));
    double min_upstream = 0.0;
    for (std::size_t u = 0; u < users_; ++u) {
      double best = kInf;
      for (std::size_t s = 0; s < servers_; ++s) best = std::min(best, upstream_cost(u, s));
      min_upstream += best;
    }

    const int k_max = max_mixers_ + max_compressors_;
    for (int k = 1; k <= k_max; ++k) {
      if (best_k_ > 0 && k * min_fixed + min_upstream >= best_cost_ - kTolerance) break;
      k_ = static_cast<std::size_t>(k);
      max_examined_ = k;
      labels_.assign(k_, 0);
      choose_labels(0, 0, 0, 0);
    }
    if (stats) *stats = {nodes_, max_examined_};
    if (best_k_ == 0)
      throw InfeasibleError("exact", "no plan meets the delay bound and server capacity");
    return best_plan_;
  }

 private:
  // Labels 0..S-1 are mixers on server s, S..2S-1 compressors.
  bool is_compressor(std::size_t v) const { return labels_[v] >= servers_; }
  std::size_t server(std::size_t v) const { return labels_[v] % servers_; }
  std::size_t site(std::size_t v) const { return in_.server_site(server(v)); }

  double fixed_cost(std::size_t s) const {
    const double p = in_.servers()[s].cost_per_mb;
    return per_mb_ ? in_.media().vm_overhead_mb * p : p;
  }
  double input_cost(std::size_t s) const {
    return per_mb_ ? in_.media().resources(1) * in_.servers()[s].cost_per_mb : 0.0;
  }
  double upstream_cost(std::size_t u, std::size_t s) const {
    return in_.network().cost(in_.participant_site(u), in_.server_site(s)) + input_cost(s);
  }
  double rate(std::size_t v) const { return is_compressor(v) ? 1.0 - keep_ : 0.0; }
  double out_factor(std::size_t v) const { return is_compressor(v) ? keep_ : 1.0; }

  bool pruned(double lower_bound) const {
    if (best_k_ == 0) return false;
    if (static_cast<int>(k_) > best_k_) return lower_bound >= best_cost_ - kTolerance;
    return lower_bound > best_cost_ + kTolerance;
  }

  void count_node() {
    if (++nodes_ > bounds_.node_budget)
      throw BoundsError("exhaustive search exceeded its budget of " +
                        std::to_string(bounds_.node_budget) + " stream graphs");
  }

  void choose_labels(std::size_t v, int mixers, int compressors, double fixed) {
    if (v == k_) {
      if (mixers == 0) return;
      fixed_ = fixed;
      min_up_.assign(users_, kInf);
      min_down_.assign(users_, kInf);
      for (std::size_t u = 0; u < users_; ++u)
        for (std::size_t w = 0; w < k_; ++w) {
          min_up_[u] = std::min(min_up_[u], upstream_cost(u, server(w)));
          min_down_[u] = std::min(
              min_down_[u], in_.network().cost(site(w), in_.participant_site(u)) * out_factor(w));
        }
      double floor = fixed_;
      for (std::size_t u = 0; u < users_; ++u) floor += min_up_[u] + min_down_[u];
      if (pruned(floor)) return;
      pairs_.clear();
      for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j)
          if (i != j && !(is_compressor(i) && is_compressor(j))) pairs_.push_back({i, j});
      adj_.assign(k_, 0);
      reach_.assign(k_, 0);
      choose_edges(0, floor);
      return;
    }
    const std::size_t first = v == 0 ? 0 : labels_[v - 1];
    for (std::size_t label = first; label < 2 * servers_; ++label) {
      const bool comp = label >= servers_;
      if (v == 0 && comp) break;  // sorted labels put a mixer first
      if (comp ? compressors >= max_compressors_ : mixers >= max_mixers_) continue;
      const std::size_t s = label % servers_;
      labels_[v] = label;
      double memory = 0.0;
      for (std::size_t w = 0; w <= v; ++w)
        if (server(w) == s) memory += in_.media().vm_memory(1);
      if (memory > in_.servers()[s].capacity_mb + kTolerance) continue;
      const double next = fixed + fixed_cost(s);
      if (pruned(next)) continue;
      choose_labels(v + 1, mixers + !comp, compressors + comp, next);
    }
  }

  void choose_edges(std::size_t p, double lower_bound) {
    if (p == pairs_.size()) {
      count_node();
      finish_skeleton(lower_bound);
      return;
    }
    choose_edges(p + 1, lower_bound);
    const auto [i, j] = pairs_[p];
    if (reach_[j] & bit(i)) return;  // would close a cycle
    const double next = lower_bound + input_cost(server(j)) +
                        in_.network().cost(site(i), site(j)) * out_factor(i);
    if (pruned(next)) return;
    const std::vector<Mask> saved = reach_;
    adj_[i] |= bit(j);
    const Mask gained = bit(j) | reach_[j];
    for (std::size_t x = 0; x < k_; ++x)
      if (x == i || (reach_[x] & bit(i))) reach_[x] |= gained;
    choose_edges(p + 1, next);
    adj_[i] &= ~bit(j);
    reach_ = saved;
  }

  void finish_skeleton(double lower_bound) {
    vm_in_.assign(k_, 0);
    vm_out_.assign(k_, 0);
    std::size_t sources = 0;
    std::size_t sinks = 0;
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (adj_[i] & bit(j)) {
          ++vm_out_[i];
          ++vm_in_[j];
        }
    for (std::size_t v = 0; v < k_; ++v) {
      sources += vm_in_[v] == 0;
      sinks += vm_out_[v] == 0;
    }
    if (sources > users_ || sinks > users_) return;

    // Topological order of the VM graph.
    topo_.clear();
    std::vector<int> indegree(vm_in_.begin(), vm_in_.end());
    for (std::size_t v = 0; v < k_; ++v)
      if (indegree[v] == 0) topo_.push_back(v);
    for (std::size_t h = 0; h < topo_.size(); ++h)
      for (std::size_t j = 0; j < k_; ++j)
        if ((adj_[topo_[h]] & bit(j)) && --indegree[j] == 0) topo_.push_back(j);

    up_.assign(users_, 0);
    choose_upstream(0, lower_bound);
  }

  void choose_upstream(std::size_t u, double lower_bound) {
    if (u == users_) {
      count_node();
      finish_upstream(lower_bound);
      return;
    }
    const std::size_t first = prev_same_site_[u] < 0 ? 0 : up_[static_cast<std::size_t>(prev_same_site_[u])];
    for (std::size_t v = first; v < k_; ++v) {
      const double next = lower_bound - min_up_[u] + upstream_cost(u, server(v));
      if (pruned(next)) continue;
      up_[u] = v;
      choose_upstream(u + 1, next);
    }
  }

  void finish_upstream(double lower_bound) {
    const MediaCostModel& media = in_.media();
    inputs_.assign(vm_in_.begin(), vm_in_.end());
    for (std::size_t u = 0; u < users_; ++u) ++inputs_[up_[u]];
    for (std::size_t v = 0; v < k_; ++v)
      if (inputs_[v] == 0) return;

    std::vector<double> memory(servers_, 0.0);
    for (std::size_t v = 0; v < k_; ++v) memory[server(v)] += media.vm_memory(inputs_[v]);
    for (std::size_t s = 0; s < servers_; ++s)
      if (memory[s] > in_.servers()[s].capacity_mb + kTolerance) return;

    const Mask all = users_ == 32 ? ~Mask{0} : (Mask{1} << users_) - 1;
    std::vector<Mask> fed(k_, 0);  // participants reaching each VM
    for (std::size_t u = 0; u < users_; ++u) {
      fed[up_[u]] |= bit(u);
      for (std::size_t w = 0; w < k_; ++w)
        if (reach_[up_[u]] & bit(w)) fed[w] |= bit(u);
    }
    bool complete_mixer = false;
    for (std::size_t v = 0; v < k_; ++v) complete_mixer |= !is_compressor(v) && fed[v] == all;
    if (!complete_mixer) return;

    // Arrival of each participant's own stream at every VM.
    const NetworkMatrix& net = in_.network();
    arrival_.assign(users_ * k_, -1.0);
    for (std::size_t u = 0; u < users_; ++u) {
      double* y = &arrival_[u * k_];
      for (std::size_t v : topo_) {
        if (!(fed[v] & bit(u))) continue;
        double start = up_[u] == v ? net.time(in_.participant_site(u), site(v)) : 0.0;
        for (std::size_t w = 0; w < k_; ++w)
          if ((adj_[w] & bit(v)) && y[w] >= 0.0)
            start = std::max(start, y[w] + net.time(site(w), site(v)) * out_factor(w));
        y[v] = start + media.handling_time(inputs_[v]);
      }
    }

    // Downstream candidates per participant, and the bound with exact minima.
    candidates_.assign(users_, {});
    double floor = lower_bound;
    for (std::size_t u = 0; u < users_; ++u) {
      double best = kInf;
      for (std::size_t v = 0; v < k_; ++v) {
        if (fed[v] != all) continue;
        const std::size_t to = in_.participant_site(u);
        const double delay = arrival_[u * k_ + v] + net.time(site(v), to) * out_factor(v);
        if (delay > in_.qos().max_delay_ms + kTolerance) continue;
        candidates_[u].push_back(v);
        best = std::min(best, net.cost(site(v), to) * out_factor(v));
      }
      if (candidates_[u].empty()) return;
      floor += best - min_down_[u];
    }
    if (pruned(floor)) return;
    down_.assign(users_, 0);
    choose_downstream(0, floor);
  }

  double downstream_cost(std::size_t v, std::size_t u) const {
    return in_.network().cost(site(v), in_.participant_site(u)) * out_factor(v);
  }

  double min_candidate_cost(std::size_t u) const {
    double best = kInf;
    for (std::size_t v : candidates_[u]) best = std::min(best, downstream_cost(v, u));
    return best;
  }

  void choose_downstream(std::size_t u, double lower_bound) {
    if (u == users_) {
      count_node();
      finish_plan(lower_bound);
      return;
    }
    const double floor_u = min_candidate_cost(u);
    const int prev = prev_same_site_[u];
    for (std::size_t v : candidates_[u]) {
      if (prev >= 0 && up_[static_cast<std::size_t>(prev)] == up_[u] &&
          v < down_[static_cast<std::size_t>(prev)])
        continue;
      const double next = lower_bound - floor_u + downstream_cost(v, u);
      if (pruned(next)) continue;
      down_[u] = v;
      choose_downstream(u + 1, next);
    }
  }

  void finish_plan(double cost) {
    std::vector<int> out(vm_out_.begin(), vm_out_.end());
    for (std::size_t u = 0; u < users_; ++u) ++out[down_[u]];
    for (std::size_t v = 0; v < k_; ++v) {
      if (out[v] == 0) return;
      if (is_compressor(v) && out[v] != inputs_[v]) return;
    }
    if (best_k_ > 0) {
      if (cost > best_cost_ + kTolerance) return;
      if (cost >= best_cost_ - kTolerance) {
        if (static_cast<int>(k_) > best_k_) return;
        if (!(build_plan().edges < best_plan_.edges)) return;
      }
    }
    best_plan_ = build_plan();
    best_cost_ = cost;
    best_k_ = static_cast<int>(k_);
  }

  Plan build_plan() const {
    Plan plan;
    plan.delay_model = DelayModel::kIlp;
    plan.feasible = true;
    for (std::size_t v = 0; v < k_; ++v)
      plan.vms.push_back({is_compressor(v) ? VmKind::kCompressor : VmKind::kMixer, server(v), inputs_[v]});
    for (std::size_t u = 0; u < users_; ++u) {
      plan.edges.push_back({Endpoint::participant(u), Endpoint::vm(up_[u]), 0.0});
      plan.edges.push_back({Endpoint::vm(down_[u]), Endpoint::participant(u), rate(down_[u])});
    }
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (adj_[i] & bit(j)) plan.edges.push_back({Endpoint::vm(i), Endpoint::vm(j), rate(i)});
    std::sort(plan.edges.begin(), plan.edges.end());
    for (std::size_t u = 0; u < users_; ++u) {
      const std::size_t to = in_.participant_site(u);
      plan.per_participant_delay.push_back(arrival_[u * k_ + down_[u]] +
                                           in_.network().time(site(down_[u]), to) * out_factor(down_[u]));
    }
    return plan;
  }

  const Instance& in_;
  SearchBounds bounds_;
  std::size_t users_;
  std::size_t servers_;
  double keep_;
  bool per_mb_;
  int max_mixers_ = 0;
  int max_compressors_ = 0;
  std::vector<int> prev_same_site_;

  std::size_t k_ = 0;
  std::vector<std::size_t> labels_;
  double fixed_ = 0.0;
  std::vector<double> min_up_;
  std::vector<double> min_down_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<Mask> adj_;
  std::vector<Mask> reach_;
  std::vector<int> vm_in_;
  std::vector<int> vm_out_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> up_;
  std::vector<int> inputs_;
  std::vector<double> arrival_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::size_t> down_;

  std::int64_t nodes_ = 0;
  int max_examined_ = 0;
  int best_k_ = 0;
  double best_cost_ = kInf;
  Plan best_plan_;
};

}  // namespace

Plan brute_force_optimal(const Instance& instance, const SearchBounds& bounds, ExactStats* stats) {
  const auto users = static_cast<int>(instance.participant_count());
  const auto servers = static_cast<int>(instance.server_count());
  if (users > bounds.max_participants)
    throw BoundsError(std::to_string(users) + " participants exceed the search bound of " +
                      std::to_string(bounds.max_participants));
  if (servers > bounds.max_servers)
    throw BoundsError(std::to_string(servers) + " servers exceed the search bound of " +
                      std::to_string(bounds.max_servers));
  if (3 * users - 2 > 32 || users > 32)
    throw BoundsError("exhaustive search supports at most 11 participants");
  instance.media().validate();
  return Search(instance, bounds).run(stats);
}

}  // namespace cram
