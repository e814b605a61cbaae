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

#ifndef CRAM_EVALUATE_HPP_
#define CRAM_EVALUATE_HPP_

#include <vector>

#include "cram/model.hpp"

namespace cram {

/// Sum over VMs of their memory footprint priced at the host server.
double eval_server_cost(const Plan& plan, const Instance& instance);

/// Sum over edges of the site-pair cost scaled by (1 - compression_rate).
double eval_network_cost(const Plan& plan, const Instance& instance);

/// Total memory (MB) held by the plan's VMs.
double allocated_memory(const Plan& plan, const Instance& instance);

/// Per-server timing under fork/join mixing.
struct ForkJoinTimes {
  /// Partial mix time per server before the join; zero where no mixer is placed.
  std::vector<double> base;
  /// Mixing plus join time per server; zero where no mixer is placed.
  std::vector<double> mix_time;
  /// Servers that host at least one mixer.
  std::vector<std::size_t> mixer_servers;
  /// End-to-end delay per participant.
  std::vector<double> delay;
};

/// Fork/join evaluation: every server hosting mixers finishes its partial mix,
/// exchanges it with the other mixer servers, then returns the result.
ForkJoinTimes eval_fork_join(const Plan& plan, const Instance& instance);

/// Longest stream-path arrival at each VM for one source participant,
/// including the handling time at every VM on the path. Entries for VMs the
/// participant does not reach are negative.
std::vector<double> ilp_arrival_times(const Plan& plan, const Instance& instance,
                                      std::size_t participant);

/// Per-participant end-to-end delay (ms).
std::vector<double> eval_delays(const Plan& plan, const Instance& instance, DelayModel model);
std::vector<double> eval_delays(const Plan& plan, const Instance& instance);

PlanMetrics metrics(const Plan& plan, const Instance& instance, DelayModel model);
PlanMetrics metrics(const Plan& plan, const Instance& instance);

double mean(const std::vector<double>& values);
double median(std::vector<double> values);

}  // namespace cram

#endif  // CRAM_EVALUATE_HPP_
