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

#include "cram/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cram {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"};

std::string num(double x, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Upper axis limit rounded to 1, 2 or 5 times a power of ten.
double nice_ceiling(double x) {
  if (x <= 0.0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(x)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= x) return m * p;
  return 10.0 * p;
}

}  // namespace

std::string grouped_bar_svg(const std::string& title, const std::string& y_label,
                            const std::vector<std::string>& categories,
                            const std::vector<BarSeries>& series) {
  double top = 0.0;
  for (const BarSeries& s : series)
    for (const auto& v : s.values)
      if (v) top = std::max(top, *v);
  top = nice_ceiling(top);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double group_w = categories.empty() ? plot_w : plot_w / static_cast<double>(categories.size());
  const double bar_w = series.empty() ? 0.0 : group_w * 0.8 / static_cast<double>(series.size());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth, 0) << "\" height=\""
      << num(kHeight, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";

  for (int t = 0; t <= 5; ++t) {
    const double value = top * t / 5.0;
    const double y = kTop + plot_h - plot_h * t / 5.0;
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << num(value, value < 10 ? 3 : 1) << "</text>\n";
  }
  svg << "<text transform=\"translate(18," << num(kTop + plot_h / 2) << ") rotate(-90)\" "
      << "text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (c >= series[s].values.size() || !series[s].values[c]) continue;
      const double v = *series[s].values[c];
      const double h = top > 0.0 ? plot_h * v / top : 0.0;
      svg << "<rect x=\"" << num(gx + bar_w * static_cast<double>(s)) << "\" y=\""
          << num(kTop + plot_h - h) << "\" width=\"" << num(bar_w) << "\" height=\"" << num(h)
          << "\" fill=\"" << kPalette[s % std::size(kPalette)] << "\"><title>"
          << escape(series[s].label) << " " << escape(categories[c]) << ": " << num(v, 4)
          << "</title></rect>\n";
    }
    svg << "<text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << escape(categories[c]) << "</text>\n";
  }
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
      << num(kLeft + plot_w) << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">participants</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(s);
    svg << "<rect x=\"" << num(kWidth - kRight + 15) << "\" y=\"" << num(y - 10)
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[s % std::size(kPalette)] << "\"/>\n";
    svg << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(y) << "\">"
        << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cram
