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

#include "cram/model.hpp"

#include <algorithm>
#include <set>

namespace cram {

void MediaCostModel::validate() const {
  if (!(time_per_stream_ms >= 0.0)) throw InstanceError("time_per_stream_ms must be >= 0");
  if (!(resource_per_stream_mb > 0.0)) throw InstanceError("resource_per_stream_mb must be > 0");
  if (!(vm_overhead_mb >= 10.0 * resource_per_stream_mb))
    throw InstanceError("vm_overhead_mb must be at least 10x resource_per_stream_mb");
  if (!(max_compression_rate > 0.0 && max_compression_rate < 1.0))
    throw InstanceError("max_compression_rate must lie in (0, 1)");
  if (!(fixed_gamma > 0.0 && fixed_gamma < 100.0))
    throw InstanceError("fixed_gamma must lie in (0, 100)");
}

Instance::Instance(std::vector<ServerSpec> servers, std::vector<Participant> participants,
                   NetworkMatrix network, MediaCostModel media, QosSpec qos, CostMode cost_mode)
    : servers_(std::move(servers)),
      participants_(std::move(participants)),
      network_(std::move(network)),
      media_(media),
      qos_(qos),
      cost_mode_(cost_mode) {
  if (participants_.size() < 2) throw InstanceError("an instance needs at least 2 participants");
  if (servers_.empty()) throw InstanceError("an instance needs at least 1 server");
  media_.validate();
  if (!(qos_.max_delay_ms > 0.0)) throw InstanceError("max_delay_ms must be > 0");
  const std::size_t sites = network_.size();
  for (const ServerSpec& s : servers_) {
    if (s.site >= sites) throw InstanceError("server site out of range");
    if (!(s.capacity_mb > 0.0)) throw InstanceError("server capacity_mb must be > 0");
    if (!(s.cost_per_mb >= 0.0)) throw InstanceError("server cost_per_mb must be >= 0");
  }
  std::set<std::string> ids;
  for (const Participant& p : participants_) {
    if (p.site >= sites) throw InstanceError("participant site out of range");
    if (!ids.insert(p.id).second) throw InstanceError("duplicate participant id '" + p.id + "'");
  }
}

Instance Instance::with_cost_mode(CostMode mode) const {
  Instance copy = *this;
  copy.cost_mode_ = mode;
  return copy;
}

Instance Instance::with_max_delay(double max_delay_ms) const {
  if (!(max_delay_ms > 0.0)) throw InstanceError("max_delay_ms must be > 0");
  Instance copy = *this;
  copy.qos_.max_delay_ms = max_delay_ms;
  return copy;
}

std::size_t Plan::mixer_count() const {
  return static_cast<std::size_t>(
      std::count_if(vms.begin(), vms.end(), [](const VmInstance& v) { return v.is_mixer(); }));
}

std::size_t Plan::compressor_count() const { return vms.size() - mixer_count(); }

std::size_t site_of(const Endpoint& e, const Plan& plan, const Instance& instance) {
  if (e.is_participant()) {
    if (e.index >= instance.participant_count())
      throw StructuralError("edge references unknown participant " + std::to_string(e.index));
    return instance.participant_site(e.index);
  }
  if (e.index >= plan.vms.size())
    throw StructuralError("edge references unknown vm " + std::to_string(e.index));
  const std::size_t s = plan.vms[e.index].server;
  if (s >= instance.server_count())
    throw StructuralError("vm " + std::to_string(e.index) + " placed on unknown server");
  return instance.server_site(s);
}

void check_references(const Plan& plan, const Instance& instance) {
  for (std::size_t v = 0; v < plan.vms.size(); ++v)
    if (plan.vms[v].server >= instance.server_count())
      throw StructuralError("vm " + std::to_string(v) + " placed on unknown server");
  for (const StreamEdge& e : plan.edges) {
    site_of(e.head, plan, instance);
    site_of(e.tail, plan, instance);
  }
}

std::string_view to_string(VmKind kind) {
  return kind == VmKind::kMixer ? "mixer" : "compressor";
}

std::string_view to_string(DelayModel model) {
  return model == DelayModel::kForkJoin ? "algorithm1" : "ilp";
}

std::string_view to_string(CostMode mode) {
  return mode == CostMode::kPerMb ? "per-mb" : "per-vm";
}

}  // namespace cram
