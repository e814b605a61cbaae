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

#include "cram/graph.hpp"

namespace cram {

StreamGraph::StreamGraph(const Plan& plan, const Instance& instance)
    : plan_(&plan),
      participants_(instance.participant_count()),
      vms_(plan.vms.size()),
      out_(participants_ + vms_),
      in_(participants_ + vms_) {
  check_references(plan, instance);
  for (std::size_t i = 0; i < plan.edges.size(); ++i) {
    out_[node(plan.edges[i].head)].push_back(i);
    in_[node(plan.edges[i].tail)].push_back(i);
  }
}

std::vector<int> StreamGraph::vm_in_degrees() const {
  std::vector<int> deg(vms_, 0);
  for (std::size_t v = 0; v < vms_; ++v) deg[v] = static_cast<int>(in_[participants_ + v].size());
  return deg;
}

Eigen::MatrixXi StreamGraph::participant_to_vm() const {
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(participants_),
                                            static_cast<Eigen::Index>(vms_));
  for (const StreamEdge& e : plan_->edges)
    if (e.head.is_participant() && e.tail.is_vm())
      d(static_cast<Eigen::Index>(e.head.index), static_cast<Eigen::Index>(e.tail.index)) = 1;
  return d;
}

Eigen::SparseMatrix<int> StreamGraph::vm_to_vm() const {
  std::vector<Eigen::Triplet<int>> triplets;
  for (const StreamEdge& e : plan_->edges)
    if (e.head.is_vm() && e.tail.is_vm())
      triplets.emplace_back(static_cast<int>(e.head.index), static_cast<int>(e.tail.index), 1);
  Eigen::SparseMatrix<int> d(static_cast<Eigen::Index>(vms_), static_cast<Eigen::Index>(vms_));
  d.setFromTriplets(triplets.begin(), triplets.end(), [](int, int) { return 1; });
  return d;
}

Eigen::MatrixXi reachability_closure(const Eigen::MatrixXi& d_uv,
                                     const Eigen::SparseMatrix<int>& d_vv) {
  Eigen::MatrixXi e = (d_uv.array() > 0).cast<int>();
  for (;;) {
    Eigen::MatrixXi step = e * d_vv;
    Eigen::MatrixXi next = ((d_uv + step).array() > 0).cast<int>();
    if (next == e) return e;
    e = std::move(next);
  }
}

}  // namespace cram
