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

#ifndef CRAM_LP_HPP_
#define CRAM_LP_HPP_

#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cram/model.hpp"

namespace cram {

/// Raised when LP text cannot be parsed.
class LpParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LpTerm {
  double coef = 0.0;
  std::string var;
};

enum class LpSense { kLessEqual, kGreaterEqual, kEqual };

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  LpSense sense = LpSense::kLessEqual;
  double rhs = 0.0;
};

enum class LpVarType { kContinuous, kInteger, kBinary };

struct LpVariable {
  std::string name;
  LpVarType type = LpVarType::kContinuous;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// A mixed-integer program in minimisation form.
class LpDocument {
 public:
  /// Declares a variable; throws std::logic_error on duplicates.
  void add_variable(LpVariable v);
  bool has_variable(std::string_view name) const { return index_.count(std::string(name)) > 0; }
  const LpVariable& variable(std::string_view name) const;
  const std::vector<LpVariable>& variables() const { return variables_; }

  /// Terms must name declared variables.
  void add_row(LpRow row);
  const std::vector<LpRow>& rows() const { return rows_; }

  void set_objective(std::vector<LpTerm> terms) { objective_ = std::move(terms); }
  const std::vector<LpTerm>& objective() const { return objective_; }

  std::size_t count(LpVarType type) const;
  /// Number of variables whose name starts with `prefix` followed by '_'.
  std::size_t count_prefix(std::string_view prefix) const;
  std::size_t count_rows_prefix(std::string_view prefix) const;

  /// CPLEX-style LP text.
  std::string to_text() const;

 private:
  std::vector<LpVariable> variables_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<LpRow> rows_;
  std::vector<LpTerm> objective_;
};

/// The integer program for an instance. Nodes are named u<i> for
/// participants, m<i> for the |U|-1 mixer slots and c<i> for the 2|U|-1
/// compressor slots; servers are s<i>.
LpDocument export_lp(const Instance& instance);

/// Parses the subset of LP text produced by LpDocument::to_text.
LpDocument parse_lp(std::string_view text);

}  // namespace cram

#endif  // CRAM_LP_HPP_
