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
#ifndef SYSID_CLI_SVG_HPP
#define SYSID_CLI_SVG_HPP

#include <string>
#include <vector>

namespace sysid::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> q1;
  std::vector<double> median;
  std::vector<double> q3;
  bool dashed = false;
};

/// Log-log line chart: median polyline over a shaded q1..q3 band per series.
/// Non-positive or non-finite points are left out of the drawing.
std::string band_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

} // namespace sysid::cli

#endif // SYSID_CLI_SVG_HPP
