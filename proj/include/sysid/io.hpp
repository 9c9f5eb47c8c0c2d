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
#ifndef SYSID_IO_HPP
#define SYSID_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysid/bootstrap.hpp"
#include "sysid/cert_bounds.hpp"
#include "sysid/estimators.hpp"
#include "sysid/lti.hpp"
#include "sysid/montecarlo.hpp"
#include "sysid/theory_bounds.hpp"

// Persistence: CSV for tabular data (17 significant digits), JSON for
// everything else. Insertion-ordered JSON keeps outputs byte-stable.

namespace sysid::io {

using Json = nlohmann::ordered_json;

/// %.17g, or "inf" / "-inf" / "nan".
std::string format_double(double v);

/// Inverse of format_double. Throws InvalidArgument naming `field` on garbage.
double parse_double(std::string_view text, std::string_view field);

/// JSON number, or the format_double string for non-finite values.
Json number(double v);

/// {"rows", "cols", "data"} with data row-major.
Json matrix_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, std::string_view field);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

// --- trajectories ----------------------------------------------------------

/// Header experiment,t,x_0..,u_0..; one row per (experiment, t), t = 0..T.
std::string batch_csv(const TrajectoryBatch& batch);

/// Same header with experiment = 0. The final row leaves the u cells empty;
/// autonomous trajectories have no u columns.
std::string single_csv(const SingleTrajectory& traj);

TrajectoryBatch read_batch_csv(std::string_view text, std::uint64_t seed);
SingleTrajectory read_single_csv(std::string_view text, std::uint64_t seed);

Json system_json(const LtiSystem& sys);
Json batch_envelope(const TrajectoryBatch& batch, const LtiSystem& sys);
Json single_envelope(const SingleTrajectory& traj, const LtiSystem& sys);

// --- estimates and certificates --------------------------------------------

Json estimate_json(const Estimate& est);
Json certificate_json(const BoundCertificate& cert);
Json ellipsoid_json(const EllipsoidCertificate& cert, const BlockBounds& blocks);
Json single_traj_json(const SingleTrajCertificate& cert);
Json bootstrap_json(const BootstrapResult& result);

/// trial,eps_A_tilde,eps_B_tilde
std::string bootstrap_csv(const BootstrapResult& result);

// --- coverage --------------------------------------------------------------

/// grid_value,replicate,error,bound,covered for one target.
std::string coverage_detail_csv(const std::vector<mc::CoverageReport>& reports, std::string_view target);

/// One row per (target, grid value).
std::string coverage_summary_csv(const std::vector<mc::CoverageReport>& reports);

Json coverage_summary_json(const std::vector<mc::CoverageReport>& reports);

} // namespace sysid::io

#endif // SYSID_IO_HPP
