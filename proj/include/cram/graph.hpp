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

#ifndef CRAM_GRAPH_HPP_
#define CRAM_GRAPH_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

#include "cram/model.hpp"

namespace cram {

/// Adjacency view of a plan. Nodes are numbered participants first, then VMs.
class StreamGraph {
 public:
  StreamGraph(const Plan& plan, const Instance& instance);

  std::size_t participant_count() const { return participants_; }
  std::size_t vm_count() const { return vms_; }
  std::size_t node_count() const { return participants_ + vms_; }

  std::size_t node(const Endpoint& e) const {
    return e.is_participant() ? e.index : participants_ + e.index;
  }
  bool is_vm_node(std::size_t n) const { return n >= participants_; }
  std::size_t vm_of(std::size_t n) const { return n - participants_; }

  /// Edge indices into plan.edges leaving / entering a node.
  const std::vector<std::size_t>& out_edges(std::size_t n) const { return out_[n]; }
  const std::vector<std::size_t>& in_edges(std::size_t n) const { return in_[n]; }

  /// Incoming edge count of every VM.
  std::vector<int> vm_in_degrees() const;

  /// Participant-to-VM incidence (|U| x |V|).
  Eigen::MatrixXi participant_to_vm() const;
  /// VM-to-VM incidence (|V| x |V|), sparse.
  Eigen::SparseMatrix<int> vm_to_vm() const;

 private:
  const Plan* plan_;
  std::size_t participants_;
  std::size_t vms_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// Participant-to-VM reachability through any chain of streams, computed as
/// the least fixpoint of E = [D_uv + E * D_vv > 0].
Eigen::MatrixXi reachability_closure(const Eigen::MatrixXi& d_uv,
                                     const Eigen::SparseMatrix<int>& d_vv);

}  // namespace cram

#endif  // CRAM_GRAPH_HPP_
