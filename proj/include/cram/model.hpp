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

#ifndef CRAM_MODEL_HPP_
#define CRAM_MODEL_HPP_

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cram {

/// Slack used for every delay and cost comparison (ms or dollars).
inline constexpr double kTolerance = 1e-9;

/// Raised when an instance violates its construction invariants.
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a plan cannot be evaluated: dangling references, cycles in the
/// stream graph, participants without a stream path.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Site {
  std::size_t id = 0;
  std::string name;
  double longitude = 0.0;
};

/// Symmetric site-by-site transmission time (ms) and per-stream cost ($).
template <typename Scalar>
class NetworkMatrixT {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  NetworkMatrixT() = default;

  NetworkMatrixT(std::vector<Site> sites, Matrix time, Matrix cost)
      : sites_(std::move(sites)), time_(std::move(time)), cost_(std::move(cost)) {
    for (std::size_t i = 0; i < sites_.size(); ++i) sites_[i].id = i;
    check(time_, "time");
    check(cost_, "cost");
  }

  /// Cost derived as a linear function of transmission time.
  static NetworkMatrixT with_linear_cost(std::vector<Site> sites, Matrix time,
                                         Scalar cost_per_ms) {
    if (cost_per_ms < Scalar(0)) throw InstanceError("network cost per ms must be >= 0");
    Matrix cost = time * cost_per_ms;
    return NetworkMatrixT(std::move(sites), std::move(time), std::move(cost));
  }

  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Matrix& time() const { return time_; }
  const Matrix& cost() const { return cost_; }
  Scalar time(std::size_t a, std::size_t b) const { return time_(a, b); }
  Scalar cost(std::size_t a, std::size_t b) const { return cost_(a, b); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (const Site& s : sites_)
      if (s.name == name) return s.id;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw InstanceError("unknown site '" + std::string(name) + "'");
  }

 private:
  void check(const Matrix& m, const char* what) const {
    const auto n = static_cast<Eigen::Index>(sites_.size());
    if (m.rows() != n || m.cols() != n)
      throw InstanceError(std::string("network ") + what + " matrix must be " +
                          std::to_string(n) + "x" + std::to_string(n));
    for (Eigen::Index a = 0; a < n; ++a) {
      if (m(a, a) != Scalar(0))
        throw InstanceError(std::string("network ") + what + " diagonal must be zero");
      for (Eigen::Index b = 0; b < n; ++b) {
        if (m(a, b) < Scalar(0))
          throw InstanceError(std::string("network ") + what + " entries must be >= 0");
        if (std::abs(m(a, b) - m(b, a)) > Scalar(kTolerance))
          throw InstanceError(std::string("network ") + what + " matrix must be symmetric (" +
                              sites_[a].name + ", " + sites_[b].name + ")");
      }
    }
    for (std::size_t i = 0; i < sites_.size(); ++i)
      for (std::size_t j = i + 1; j < sites_.size(); ++j)
        if (sites_[i].name == sites_[j].name)
          throw InstanceError("duplicate site '" + sites_[i].name + "'");
  }

  std::vector<Site> sites_;
  Matrix time_;
  Matrix cost_;
};

using NetworkMatrix = NetworkMatrixT<double>;

struct ServerSpec {
  std::size_t site = 0;
  double capacity_mb = 10240.0;
  double cost_per_mb = 0.01;
};

struct Participant {
  std::string id;
  std::size_t site = 0;
};

/// Linear media handling model shared by mixers and compressors.
struct MediaCostModel {
  double time_per_stream_ms = 6.0;
  double resource_per_stream_mb = 20.0;
  double vm_overhead_mb = 400.0;
  double max_compression_rate = 0.95;
  /// Fixed compression percentage used by the exact formulation, in (0, 100).
  double fixed_gamma = 95.0;

  double handling_time(double streams) const { return time_per_stream_ms * streams; }
  double resources(double streams) const { return resource_per_stream_mb * streams; }
  double vm_memory(double streams) const { return vm_overhead_mb + resources(streams); }
  double gamma_rate() const { return fixed_gamma / 100.0; }

  void validate() const;
};

struct QosSpec {
  double max_delay_ms = 400.0;
};

/// Server cost is either charged per allocated MB or as a flat price per VM.
enum class CostMode { kPerMb, kPerVm };

/// A complete, validated problem. Immutable after construction.
class Instance {
 public:
  Instance(std::vector<ServerSpec> servers, std::vector<Participant> participants,
           NetworkMatrix network, MediaCostModel media = {}, QosSpec qos = {},
           CostMode cost_mode = CostMode::kPerMb);

  const std::vector<ServerSpec>& servers() const { return servers_; }
  const std::vector<Participant>& participants() const { return participants_; }
  const NetworkMatrix& network() const { return network_; }
  const MediaCostModel& media() const { return media_; }
  const QosSpec& qos() const { return qos_; }
  CostMode cost_mode() const { return cost_mode_; }

  std::size_t server_count() const { return servers_.size(); }
  std::size_t participant_count() const { return participants_.size(); }
  std::size_t server_site(std::size_t s) const { return servers_[s].site; }
  std::size_t participant_site(std::size_t u) const { return participants_[u].site; }

  /// Copy with a different server cost convention.
  Instance with_cost_mode(CostMode mode) const;
  /// Copy with a different delay bound.
  Instance with_max_delay(double max_delay_ms) const;

 private:
  std::vector<ServerSpec> servers_;
  std::vector<Participant> participants_;
  NetworkMatrix network_;
  MediaCostModel media_;
  QosSpec qos_;
  CostMode cost_mode_;
};

enum class VmKind { kMixer, kCompressor };

struct VmInstance {
  VmKind kind = VmKind::kMixer;
  std::size_t server = 0;
  int input_count = 0;

  bool is_mixer() const { return kind == VmKind::kMixer; }
  bool is_compressor() const { return kind == VmKind::kCompressor; }
};

/// Either a participant index or a VM index within a Plan.
struct Endpoint {
  enum class Kind { kParticipant, kVm };
  Kind kind = Kind::kParticipant;
  std::size_t index = 0;

  static Endpoint participant(std::size_t i) { return {Kind::kParticipant, i}; }
  static Endpoint vm(std::size_t i) { return {Kind::kVm, i}; }
  bool is_participant() const { return kind == Kind::kParticipant; }
  bool is_vm() const { return kind == Kind::kVm; }

  auto operator<=>(const Endpoint&) const = default;
};

/// One video stream from head to tail. The rate is the fraction removed by
/// the compressor at the head and is zero for any other head.
struct StreamEdge {
  Endpoint head;
  Endpoint tail;
  double compression_rate = 0.0;

  auto operator<=>(const StreamEdge&) const = default;
};

/// Which end-to-end delay semantics a plan is evaluated under: the fork/join
/// mixing model the heuristic reasons with, or longest stream path arrival
/// as in the integer program.
enum class DelayModel { kForkJoin, kIlp };

struct Plan {
  std::vector<VmInstance> vms;
  std::vector<StreamEdge> edges;
  /// Indexed by participant.
  std::vector<double> per_participant_delay;
  bool feasible = false;
  DelayModel delay_model = DelayModel::kForkJoin;

  std::size_t mixer_count() const;
  std::size_t compressor_count() const;
};

struct PlanMetrics {
  double server_cost = 0.0;
  double network_cost = 0.0;
  double total_cost = 0.0;
  double max_delay = 0.0;
  std::vector<double> compression_rates;
  int vm_count = 0;
  double allocated_memory = 0.0;
};

/// Site of an endpoint; throws StructuralError on dangling references.
std::size_t site_of(const Endpoint& e, const Plan& plan, const Instance& instance);

/// Throws StructuralError unless every VM server and edge endpoint resolves.
void check_references(const Plan& plan, const Instance& instance);

std::string_view to_string(VmKind kind);
std::string_view to_string(DelayModel model);
std::string_view to_string(CostMode mode);

}  // namespace cram

#endif  // CRAM_MODEL_HPP_
