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

#ifndef CRAM_VALIDATE_HPP_
#define CRAM_VALIDATE_HPP_

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

#include "cram/model.hpp"

namespace cram {

/// Constraint families a plan can break.
enum class Constraint {
  kStructure,                 // dangling reference, cycle, or unevaluable stream path
  kParticipantOutDegree,      // each participant sends exactly one stream
  kParticipantInDegree,       // each participant receives exactly one stream
  kParticipantToParticipant,  // no direct participant link
  kIncompleteFinalStream,     // final stream must come from a VM every participant reaches
  kCompressorBalance,         // compressor inputs equal outputs
  kCompressorToCompressor,    // no compressor chaining
  kNoCompleteMixer,           // some mixer must be reached by every participant
  kVmPlacement,               // placed VMs have inputs, outputs and one server
  kUnreachedVm,               // every VM is fed by some participant
  kInputCount,                // recorded input count matches incoming streams
  kCompressionRate,           // rates within [0, max] and only on compressor outputs
  kCapacity,                  // per-server memory within capacity
  kDelay,                     // per-participant delay within the bound
};

std::string_view to_string(Constraint c);

struct Violation {
  Constraint constraint;
  std::string message;
};

/// Returns every violated constraint in a stable order; empty iff feasible.
std::vector<Violation> validate_plan(const Plan& plan, const Instance& instance,
                                     DelayModel model);
std::vector<Violation> validate_plan(const Plan& plan, const Instance& instance);

/// Dense matrices of the integer program for one plan. Node order for D is
/// participants, then |U|-1 mixer slots, then 2|U|-1 compressor slots; VM
/// columns follow the same slot order.
struct IlpArtifacts {
  Eigen::MatrixXi D;               // (4|U|-2) x (4|U|-2)
  Eigen::MatrixXi E;               // |U| x (3|U|-2)
  std::vector<Eigen::MatrixXi> F;  // per participant, (3|U|-2) x (3|U|-2)
  Eigen::MatrixXi X;               // |S| x (3|U|-2)
  Eigen::MatrixXd Y;               // |U| x (3|U|-2), zero where unreached
  Eigen::MatrixXi Z;               // |S| x (3|U|-2)
  Eigen::VectorXi G;               // 3|U|-2
  int beta = 0;
  /// Slot assigned to each plan VM.
  std::vector<int> slot_of_vm;
};

/// Throws StructuralError when the plan has more mixers or compressors than
/// the program has slots, or multiple streams between one pair of nodes.
IlpArtifacts build_ilp_artifacts(const Plan& plan, const Instance& instance);

}  // namespace cram

#endif  // CRAM_VALIDATE_HPP_
