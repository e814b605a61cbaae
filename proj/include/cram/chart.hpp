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

#ifndef CRAM_CHART_HPP_
#define CRAM_CHART_HPP_

#include <optional>
#include <string>
#include <vector>

namespace cram {

struct BarSeries {
  std::string label;
  /// One value per category; empty marks a missing bar.
  std::vector<std::optional<double>> values;
};

/// Static SVG with one group of bars per category.
std::string grouped_bar_svg(const std::string& title, const std::string& y_label,
                            const std::vector<std::string>& categories,
                            const std::vector<BarSeries>& series);

}  // namespace cram

#endif  // CRAM_CHART_HPP_
