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

#ifndef CRAM_EXACT_HPP_
#define CRAM_EXACT_HPP_

#include <cstdint>
#include <stdexcept>

#include "cram/heuristic.hpp"
#include "cram/model.hpp"

namespace cram {

/// The instance is too large for exhaustive search, or the search ran out of
/// its node budget.
class BoundsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchBounds {
  int max_participants = 5;
  int max_servers = 3;
  /// Negative means 2|U|-1.
  int max_compressors = -1;
  /// Evaluated stream graphs before the search refuses.
  std::int64_t node_budget = 10'000'000;
};

struct ExactStats {
  std::int64_t nodes = 0;
  /// Largest VM count examined.
  int max_vms_examined = 0;
};

/// Minimum-cost plan under the integer program's semantics: every
/// compressor output carries the fixed rate, delays follow stream-path
/// arrival. Ties prefer fewer VMs, then the lexicographically smaller edge
/// list. Throws BoundsError on refusal and InfeasibleError (phase "exact")
/// when no plan exists.
Plan brute_force_optimal(const Instance& instance, const SearchBounds& bounds = {},
                         ExactStats* stats = nullptr);

}  // namespace cram

#endif  // CRAM_EXACT_HPP_
