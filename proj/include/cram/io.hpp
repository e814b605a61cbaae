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

#ifndef CRAM_IO_HPP_
#define CRAM_IO_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "cram/model.hpp"

namespace cram {

/// Malformed or inconsistent input document. The message names the location.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& instance);

Plan plan_from_json(const nlohmann::json& doc, const Instance& instance);
/// Plan with per-participant delays and metrics under the plan's delay model.
nlohmann::json plan_to_json(const Plan& plan, const Instance& instance);

nlohmann::json metrics_to_json(const PlanMetrics& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
nlohmann::json parse_json(std::string_view text, const std::string& origin);

Instance load_instance(const std::string& path);
Plan load_plan(const std::string& path, const Instance& instance);

/// 64-bit FNV-1a digest of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Fixed-point rendering used in reports: times 3 decimals, costs 4.
double round_to(double x, int decimals);

DelayModel parse_delay_model(std::string_view text);
CostMode parse_cost_mode(std::string_view text);

}  // namespace cram

#endif  // CRAM_IO_HPP_
