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

#ifndef CRAM_HEURISTIC_HPP_
#define CRAM_HEURISTIC_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cram/model.hpp"

namespace cram {

/// No plan satisfies the delay and capacity limits. Carries the phase that
/// gave up and, for the mixer-count search, the last handling time seen.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string phase, std::string reason,
                  std::optional<double> last_handling_time_ms = std::nullopt)
      : std::runtime_error(phase + ": " + reason),
        phase_(std::move(phase)),
        reason_(std::move(reason)),
        last_handling_time_ms_(last_handling_time_ms) {}

  const std::string& phase() const { return phase_; }
  const std::string& reason() const { return reason_; }
  std::optional<double> last_handling_time_ms() const { return last_handling_time_ms_; }

 private:
  std::string phase_;
  std::string reason_;
  std::optional<double> last_handling_time_ms_;
};

struct MinMixers {
  int min_mixer = 0;
  int max_user = 0;
  double handling_time_ms = 0.0;
};

/// Fewest mixers whose per-mixer load and join fit the delay bound and the
/// largest server.
MinMixers min_mixers(const Instance& instance);

/// Server indices ordered by total transmission time to all participants;
/// ties keep input order.
std::vector<std::size_t> dsort(const std::vector<ServerSpec>& servers,
                               const std::vector<Participant>& participants,
                               const NetworkMatrix& network);

enum class SenderKind { kParticipant, kServer };

/// Origin of a stream that needs compressing: a participant index or the
/// server whose lead mixer sends it.
struct Sender {
  SenderKind kind = SenderKind::kParticipant;
  std::size_t index = 0;
};

struct MixerSlot {
  std::size_t vm = 0;
  int participants = 0;
};

struct CompressedStream {
  std::size_t sender_site = 0;
  /// Longest time allowed from sender to destination through the compressor.
  double budget_ms = 0.0;
};

/// A compressor pools streams of one sender kind towards one server.
struct CompressorSlot {
  std::size_t vm = 0;
  std::size_t dest_server = 0;
  SenderKind kind = SenderKind::kParticipant;
  std::vector<CompressedStream> streams;
};

/// Working variables of one allocation run. VM indices refer to `vms`.
struct AllocationState {
  explicit AllocationState(const Instance& instance);

  std::vector<double> remaining_capacity;
  std::vector<std::vector<MixerSlot>> mixers_per_server;
  std::vector<std::vector<CompressorSlot>> compressors_per_server;
  std::vector<double> mix_time_per_server;
  int max_user = 0;
  int min_mixer = 0;
  /// Server visiting order from dsort.
  std::vector<std::size_t> order;
  /// Servers hosting mixers, in visiting order.
  std::vector<std::size_t> used_servers;
  std::vector<VmInstance> vms;
  std::vector<StreamEdge> edges;

  /// First mixer placed on a server; it gathers that server's partial mixes.
  std::size_t lead(std::size_t server) const { return mixers_per_server[server].front().vm; }
};

struct CompressOutcome {
  std::size_t chosen_server = 0;
  std::size_t compressor_vm = 0;
  bool new_vm_created = false;
  double real_rate = 0.0;
  std::vector<StreamEdge> edges_added;
};

/// Routes a stream from `sender` to `dest_vm` on `dest_server` through a new
/// or shared compressor so that it arrives `t` ms earlier.
CompressOutcome compress(const Sender& sender, std::size_t dest_server, std::size_t dest_vm,
                         double t, AllocationState& state, const Instance& instance);

struct AcsChoice {
  std::size_t server = 0;
  std::size_t mixer_vm = 0;
};

/// Nearest server with a mixer below max_user; takes its least-loaded mixer.
AcsChoice acs(std::size_t participant, AllocationState& state, const Instance& instance);

void place_mixers(AllocationState& state, const Instance& instance);
void inter_mixer_compress(AllocationState& state, const Instance& instance);
/// Connects every participant, then emits the plan with minimal rates.
Plan assign_participants(AllocationState& state, const Instance& instance);

Plan cram_allocate(const Instance& instance);

}  // namespace cram

#endif  // CRAM_HEURISTIC_HPP_
