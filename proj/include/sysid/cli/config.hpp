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
#ifndef SYSID_CLI_CONFIG_HPP
#define SYSID_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sysid/io.hpp"
#include "sysid/lti.hpp"

namespace sysid::cli {

struct DataSettings {
  std::string mode = "batch";  // "batch" or "single"
  std::size_t n = 100;         // rollouts (batch)
  std::size_t horizon = 6;     // T
  bool autonomous = false;     // single only
};

struct BootstrapSettings {
  bool enabled = false;
  std::size_t trials = 200;
};

struct CoverageSettings {
  std::string scenario;
  std::vector<double> grid;
  std::size_t replicates = 1000;
  std::size_t horizon = 3;
  double alpha = 1.0;
  bool use_true_b = false;
  std::size_t trials = 200;
  double regularizer = 1.0;
  std::size_t n = 2;
  std::size_t m = 2;
};

struct FigureSettings {
  std::size_t runs = 10;
  std::vector<double> t_grid{250, 500, 1000, 2000, 4000};
  std::vector<double> n_grid{25, 50, 100, 200, 400};
  std::size_t horizon = 6;
  std::size_t trials = 200;
  // At alpha = 1 the input block of V matches E[V_T], so V <= alpha V_T fails
  // about half the time; 2 keeps the certificate defined on nearly every run.
  double alpha = 2.0;
};

/**
 * @brief Parsed scenario configuration (JSON, "schema": 1).
 *
 * Every object rejects keys it does not know. Errors are ErrorCode::Config and
 * name the offending field by its dotted path.
 */
struct ScenarioConfig {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double delta = 0.05;
  LtiSystem system = LtiSystem::double_integrator();
  DataSettings data;
  std::string estimator = "last_step";  // or "pooled" (batch only)
  std::vector<std::string> bounds;      // empty: every applicable bound
  std::vector<double> alphas{1.0};
  std::string b_source = "estimate";    // or "true"
  BootstrapSettings bootstrap;
  std::optional<CoverageSettings> coverage;
  FigureSettings figure;
  io::Json raw;  // the document as read, echoed into outputs
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

} // namespace sysid::cli

#endif // SYSID_CLI_CONFIG_HPP
