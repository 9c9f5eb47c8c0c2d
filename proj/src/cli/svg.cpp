/*
 Copyright 2026 The sysid Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "sysid/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sysid::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool drawable(double v) { return std::isfinite(v) && v > 0.0; }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!drawable(v)) return;
    lo = std::min(lo, std::log10(v));
    hi = std::max(hi, std::log10(v));
  }

  void settle() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-9) {  // single point: open a decade around it
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

} // namespace

std::string band_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  Range xr;
  Range yr;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(s.x[i]);
      yr.add(s.q1[i]);
      yr.add(s.median[i]);
      yr.add(s.q3[i]);
    }
  }
  xr.settle();
  yr.settle();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - std::log10(y)) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title +
         "</text>\n";
  out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  // Decade ticks on both axes.
  for (int d = static_cast<int>(std::ceil(xr.lo)); d <= static_cast<int>(std::floor(xr.hi)); ++d) {
    const double x = px(std::pow(10.0, d));
    out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(kTop) +
           "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           label(std::pow(10.0, d)) + "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(yr.lo)); d <= static_cast<int>(std::floor(yr.hi)); ++d) {
    const double y = py(std::pow(10.0, d));
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
           label(std::pow(10.0, d)) + "</text>\n";
  }
  out += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 14) + "\" text-anchor=\"middle\">" + x_label +
         "</text>\n";
  out += "<text transform=\"translate(18," + fmt(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + y_label +
         "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const std::string color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];

    std::string upper;
    std::string lower;
    std::string line;
    std::string markers;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!drawable(s.x[i])) continue;
      if (drawable(s.q1[i]) && drawable(s.q3[i])) {
        upper += fmt(px(s.x[i])) + "," + fmt(py(s.q3[i])) + " ";
        lower = fmt(px(s.x[i])) + "," + fmt(py(s.q1[i])) + " " + lower;
      }
      if (drawable(s.median[i])) {
        line += fmt(px(s.x[i])) + "," + fmt(py(s.median[i])) + " ";
        markers += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.median[i])) + "\" r=\"2.5\" fill=\"" +
                   color + "\"/>\n";
      }
    }
    if (!upper.empty()) {
      out += "<polygon points=\"" + upper + lower + "\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    if (!line.empty()) {
      out += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    }
    out += markers;

    const double ly = kTop + 12 + 18 * static_cast<double>(k);
    const double lx = kLeft + pw + 12;
    out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 22) + "\" y2=\"" + fmt(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    out += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly + 4) + "\">" + s.name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

} // namespace sysid::cli
