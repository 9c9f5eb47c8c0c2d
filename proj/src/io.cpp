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
#include "sysid/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sysid/error.hpp"

namespace sysid::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

std::size_t parse_index(std::string_view text, std::string_view field) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(field) + ": not an index: '" + std::string(text) + "'");
  }
  return v;
}

struct Layout {
  std::size_t n_x = 0;
  std::size_t n_u = 0;
};

Layout parse_header(std::string_view header) {
  const auto cols = split(header, ',');
  if (cols.size() < 3 || cols[0] != "experiment" || cols[1] != "t") {
    throw Error(ErrorCode::InvalidArgument, "trajectory csv: header must start with experiment,t");
  }
  Layout l;
  for (std::size_t i = 2; i < cols.size(); ++i) {
    const std::string expect_x = "x_" + std::to_string(l.n_x);
    const std::string expect_u = "u_" + std::to_string(l.n_u);
    if (l.n_u == 0 && cols[i] == expect_x) {
      ++l.n_x;
    } else if (cols[i] == expect_u) {
      ++l.n_u;
    } else {
      throw Error(ErrorCode::InvalidArgument, "trajectory csv: unexpected column '" + std::string(cols[i]) + "'");
    }
  }
  if (l.n_x == 0) {
    throw Error(ErrorCode::InvalidArgument, "trajectory csv: no state columns");
  }
  return l;
}

void append_row(std::string& out, std::size_t experiment, std::size_t t, const RowMatrix& states, Eigen::Index sr,
                const RowMatrix* inputs, Eigen::Index ir, std::size_t n_u) {
  out += std::to_string(experiment);
  out += ',';
  out += std::to_string(t);
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    out += ',';
    out += format_double(states(sr, j));
  }
  for (std::size_t j = 0; j < n_u; ++j) {
    out += ',';
    if (inputs != nullptr) {
      out += format_double((*inputs)(ir, static_cast<Eigen::Index>(j)));
    }
  }
  out += '\n';
}

std::string header(std::size_t n_x, std::size_t n_u) {
  std::string h = "experiment,t";
  for (std::size_t j = 0; j < n_x; ++j) h += ",x_" + std::to_string(j);
  for (std::size_t j = 0; j < n_u; ++j) h += ",u_" + std::to_string(j);
  return h + "\n";
}

Json quantiles_json(const mc::Quantiles& q) {
  return Json{{"q1", number(q.q1)}, {"median", number(q.median)}, {"q3", number(q.q3)}};
}

} // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::string_view field) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(field) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json matrix_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(number(m(i, j)));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j, std::string_view field) {
  const std::string f(field);
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw Error(ErrorCode::InvalidArgument, f + ": expected {rows, cols, data}");
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::DimensionMismatch, f + ": data length does not match rows*cols");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = data[static_cast<std::size_t>(i * cols + c)];
      m(i, c) = e.is_string() ? parse_double(e.get<std::string>(), f) : e.get<double>();
    }
  }
  return m;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const Json& j) {
  return j.dump(2) + "\n";
}

std::string batch_csv(const TrajectoryBatch& batch) {
  batch.validate();
  std::string out = header(batch.n_x, batch.n_u);
  for (std::size_t e = 0; e < batch.records.size(); ++e) {
    const ExperimentRecord& r = batch.records[e];
    for (Eigen::Index t = 0; t < r.states.rows(); ++t) {
      append_row(out, e, static_cast<std::size_t>(t), r.states, t, &r.inputs, t, batch.n_u);
    }
  }
  return out;
}

std::string single_csv(const SingleTrajectory& traj) {
  traj.validate();
  std::string out = header(traj.n_x, traj.n_u);
  const auto horizon = static_cast<Eigen::Index>(traj.horizon());
  for (Eigen::Index t = 0; t <= horizon; ++t) {
    append_row(out, 0, static_cast<std::size_t>(t), traj.states, t, t < horizon ? &traj.inputs : nullptr, t,
               traj.n_u);
  }
  return out;
}

TrajectoryBatch read_batch_csv(std::string_view text, std::uint64_t seed) {
  const auto lines = lines_of(text);
  if (lines.empty()) {
    throw Error(ErrorCode::InvalidArgument, "trajectory csv: empty");
  }
  const Layout layout = parse_header(lines[0]);
  const std::size_t width = 2 + layout.n_x + layout.n_u;

  // Rows are experiment-major with t = 0..T; split into runs first.
  std::vector<std::vector<std::vector<std::string_view>>> runs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != width) {
      throw Error(ErrorCode::DimensionMismatch, "trajectory csv line " + std::to_string(i + 1) + ": wrong cell count");
    }
    const std::size_t e = parse_index(cells[0], "experiment");
    const std::size_t t = parse_index(cells[1], "t");
    if (e == runs.size() && t == 0) {
      runs.emplace_back();
    } else if (e + 1 != runs.size() || t != runs.back().size()) {
      throw Error(ErrorCode::InvalidArgument, "trajectory csv line " + std::to_string(i + 1) + ": rows out of order");
    }
    runs.back().push_back(std::move(cells));
  }
  if (runs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "trajectory csv: no rows");
  }

  TrajectoryBatch batch;
  batch.n_x = layout.n_x;
  batch.n_u = layout.n_u;
  batch.horizon = runs.front().size() - 1;
  batch.seed = seed;
  for (const auto& run : runs) {
    ExperimentRecord rec;
    const auto rows = static_cast<Eigen::Index>(run.size());
    rec.states.resize(rows, static_cast<Eigen::Index>(layout.n_x));
    rec.inputs.resize(rows, static_cast<Eigen::Index>(layout.n_u));
    for (Eigen::Index t = 0; t < rows; ++t) {
      const auto& cells = run[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < layout.n_x; ++j) {
        rec.states(t, static_cast<Eigen::Index>(j)) = parse_double(cells[2 + j], "x");
      }
      for (std::size_t j = 0; j < layout.n_u; ++j) {
        rec.inputs(t, static_cast<Eigen::Index>(j)) = parse_double(cells[2 + layout.n_x + j], "u");
      }
    }
    batch.records.push_back(std::move(rec));
  }
  batch.validate();
  return batch;
}

SingleTrajectory read_single_csv(std::string_view text, std::uint64_t seed) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "trajectory csv: no rows");
  }
  const Layout layout = parse_header(lines[0]);
  const std::size_t width = 2 + layout.n_x + layout.n_u;
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);

  SingleTrajectory traj;
  traj.n_x = layout.n_x;
  traj.n_u = layout.n_u;
  traj.seed = seed;
  traj.states.resize(rows, static_cast<Eigen::Index>(layout.n_x));
  traj.inputs.resize(rows - 1, static_cast<Eigen::Index>(layout.n_u));
  for (Eigen::Index t = 0; t < rows; ++t) {
    const auto cells = split(lines[static_cast<std::size_t>(t) + 1], ',');
    if (cells.size() != width) {
      throw Error(ErrorCode::DimensionMismatch, "trajectory csv line " + std::to_string(t + 2) + ": wrong cell count");
    }
    if (parse_index(cells[0], "experiment") != 0 || parse_index(cells[1], "t") != static_cast<std::size_t>(t)) {
      throw Error(ErrorCode::InvalidArgument, "trajectory csv line " + std::to_string(t + 2) + ": rows out of order");
    }
    for (std::size_t j = 0; j < layout.n_x; ++j) {
      traj.states(t, static_cast<Eigen::Index>(j)) = parse_double(cells[2 + j], "x");
    }
    if (t + 1 < rows) {
      for (std::size_t j = 0; j < layout.n_u; ++j) {
        traj.inputs(t, static_cast<Eigen::Index>(j)) = parse_double(cells[2 + layout.n_x + j], "u");
      }
    }
  }
  traj.validate();
  return traj;
}

Json system_json(const LtiSystem& sys) {
  return Json{{"n_x", sys.n_x()},
              {"n_u", sys.n_u()},
              {"A", matrix_json(sys.a())},
              {"B", matrix_json(sys.b())},
              {"sigma_w", number(sys.sigma_w())},
              {"sigma_u", number(sys.sigma_u())}};
}

Json batch_envelope(const TrajectoryBatch& batch, const LtiSystem& sys) {
  return Json{{"kind", "batch"},
              {"seed", batch.seed},
              {"n_experiments", batch.size()},
              {"horizon", batch.horizon},
              {"system", system_json(sys)}};
}

Json single_envelope(const SingleTrajectory& traj, const LtiSystem& sys) {
  return Json{{"kind", traj.autonomous() ? "single_autonomous" : "single"},
              {"seed", traj.seed},
              {"horizon", traj.horizon()},
              {"system", system_json(sys)}};
}

Json estimate_json(const Estimate& est) {
  Json j{{"n_x", est.n_x},
         {"n_u", est.n_u},
         {"samples", est.samples},
         {"theta_hat", matrix_json(est.theta_hat)},
         {"A_hat", matrix_json(est.a_hat())},
         {"B_hat", matrix_json(est.b_hat())},
         {"gram_eig_min", number(est.gram_eigs.min)},
         {"gram_eig_max", number(est.gram_eigs.max)},
         {"residual_norm", number(est.residual_norm)}};
  if (est.errors) {
    j["error_theta"] = number(est.errors->theta);
    j["error_A"] = number(est.errors->a);
    j["error_B"] = number(est.errors->b);
  }
  return j;
}

Json certificate_json(const BoundCertificate& cert) {
  Json j{{"value", number(cert.value)},
         {"delta", number(cert.delta)},
         {"source", cert.source},
         {"precondition_ok", cert.precondition_ok}};
  if (!cert.violated_condition.empty()) {
    j["violated_condition"] = cert.violated_condition;
  }
  return j;
}

Json ellipsoid_json(const EllipsoidCertificate& cert, const BlockBounds& blocks) {
  return Json{{"scale_c2", number(cert.scale_c2)},
              {"delta", number(cert.delta)},
              {"shape", matrix_json(cert.shape())},
              {"infinite_directions", cert.infinite_directions},
              {"eps_A", number(blocks.eps_a)},
              {"eps_B", number(blocks.eps_b)}};
}

Json single_traj_json(const SingleTrajCertificate& cert) {
  return Json{{"certificate", certificate_json(cert.bound)},
              {"certified", cert.certified},
              {"alpha", number(cert.alpha)},
              {"ordering_margin", number(cert.ordering_margin)},
              {"alpha_min", number(cert.alpha_min)},
              {"lambda_min_VT", number(cert.lambda_min_vt)},
              {"logdet_VT_Vinv", number(cert.logdet_vt_v)},
              {"b_source", cert.b_source}};
}

Json bootstrap_json(const BootstrapResult& result) {
  Json a = Json::array();
  Json b = Json::array();
  for (const auto& s : result.samples) {
    a.push_back(number(s.eps_a));
    b.push_back(number(s.eps_b));
  }
  return Json{{"eps_A", number(result.eps_a)},
              {"eps_B", number(result.eps_b)},
              {"M", result.trials},
              {"singular_trials", result.singular_trials},
              {"delta", number(result.delta)},
              {"seed", result.seed},
              {"eps_A_tilde", std::move(a)},
              {"eps_B_tilde", std::move(b)}};
}

std::string bootstrap_csv(const BootstrapResult& result) {
  std::string out = "trial,eps_A_tilde,eps_B_tilde\n";
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    out += std::to_string(i) + "," + format_double(result.samples[i].eps_a) + "," +
           format_double(result.samples[i].eps_b) + "\n";
  }
  return out;
}

std::string coverage_detail_csv(const std::vector<mc::CoverageReport>& reports, std::string_view target) {
  std::string out = "grid_value,replicate,error,bound,covered\n";
  for (const auto& rep : reports) {
    if (rep.target != target) continue;
    for (const auto& r : rep.per_replicate) {
      out += format_double(r.grid_value) + "," + std::to_string(r.replicate) + "," + format_double(r.error) + "," +
             format_double(r.bound) + "," + (r.covered ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string coverage_summary_csv(const std::vector<mc::CoverageReport>& reports) {
  std::string out =
      "target,grid_value,replicates,covered,certified,failures,coverage,certified_coverage,delta,"
      "error_q1,error_median,error_q3,bound_q1,bound_median,bound_q3,slope\n";
  for (const auto& r : reports) {
    out += r.target + "," + format_double(r.grid_value) + "," + std::to_string(r.replicates) + "," +
           std::to_string(r.covered) + "," + std::to_string(r.certified) + "," + std::to_string(r.failures) + "," +
           format_double(r.coverage) + "," + format_double(r.certified_coverage) + "," + format_double(r.delta) + "," +
           format_double(r.error_quantiles.q1) + "," + format_double(r.error_quantiles.median) + "," +
           format_double(r.error_quantiles.q3) + "," + format_double(r.bound_quantiles.q1) + "," +
           format_double(r.bound_quantiles.median) + "," + format_double(r.bound_quantiles.q3) + "," +
           (r.slope ? format_double(*r.slope) : std::string()) + "\n";
  }
  return out;
}

Json coverage_summary_json(const std::vector<mc::CoverageReport>& reports) {
  Json rows = Json::array();
  for (const auto& r : reports) {
    Json j{{"target", r.target},
           {"grid_value", number(r.grid_value)},
           {"replicates", r.replicates},
           {"covered", r.covered},
           {"certified", r.certified},
           {"failures", r.failures},
           {"coverage", number(r.coverage)},
           {"certified_coverage", number(r.certified_coverage)},
           {"delta", number(r.delta)},
           {"error", quantiles_json(r.error_quantiles)},
           {"bound", quantiles_json(r.bound_quantiles)}};
    if (r.slope) {
      j["slope"] = number(*r.slope);
    }
    rows.push_back(std::move(j));
  }
  return rows;
}

} // namespace sysid::io
