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
#ifndef SYSID_CLI_COMMANDS_HPP
#define SYSID_CLI_COMMANDS_HPP

#include <filesystem>
#include <vector>

#include "sysid/cli/config.hpp"

namespace sysid::cli {

using Paths = std::vector<std::filesystem::path>;

/// trajectories.csv + trajectories.json.
Paths cmd_simulate(const ScenarioConfig& config, const std::filesystem::path& out);

/// trajectories.csv + certify.json (+ bootstrap.csv when enabled).
Paths cmd_certify(const ScenarioConfig& config, const std::filesystem::path& out);

/// coverage_<id>_<target>.csv per target, coverage_<id>_summary.csv, coverage_<id>.json.
Paths cmd_coverage(const ScenarioConfig& config, const std::filesystem::path& out);

/// figure_<panel>.svg + figure_<panel>.csv for single_traj, ellipsoid, bootstrap.
Paths cmd_figure(const ScenarioConfig& config, const std::filesystem::path& out);

/// Entry point shared by the binary and the CLI tests. Returns the exit code.
int run(int argc, char** argv);

} // namespace sysid::cli

#endif // SYSID_CLI_COMMANDS_HPP
