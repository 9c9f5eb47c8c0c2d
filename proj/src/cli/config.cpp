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
#include "sysid/cli/config.hpp"

#include <cmath>
#include <set>

#include "sysid/error.hpp"

namespace sysid::cli {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::Config, "field '" + field + "': " + why);
}

// Reads the members of one JSON object; finish() rejects anything not read.
class Fields {
public:
  Fields(const io::Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      fail(path_.empty() ? "<root>" : path_, "must be an object");
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const io::Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double real(const std::string& key, double fallback) {
    const io::Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(name(key), "must be a number");
    return v->get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1) {
    const io::Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < static_cast<long long>(min)) {
      fail(name(key), "must be an integer >= " + std::to_string(min));
    }
    return v->get<std::size_t>();
  }

  bool flag(const std::string& key, bool fallback) {
    const io::Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(name(key), "must be true or false");
    return v->get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const io::Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(name(key), "must be a string");
    const auto s = v->get<std::string>();
    std::string options;
    for (const char* a : allowed) {
      if (s == a) return s;
      options += options.empty() ? a : std::string(", ") + a;
    }
    fail(name(key), "unknown value '" + s + "' (expected one of: " + options + ")");
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    const io::Json* v = find(key);
    if (v == nullptr) return fallback;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) fail(name(key), "must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail(name(key), "must contain only numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key) == 0) {
        fail(name(key), "unknown key");
      }
    }
  }

private:
  const io::Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Matrix parse_rows(const io::Json& j, const std::string& field, bool allow_empty) {
  if (!j.is_array() || (j.empty() && !allow_empty)) fail(field, "must be a list of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array()) fail(field, "must be a list of rows");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) fail(field, "rows have different lengths");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) fail(field, "entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

LtiSystem parse_system(const io::Json& j) {
  Fields f(j, "system");
  const std::string preset = f.choice("preset", "", {"double_integrator", "rotation"});
  Matrix a;
  Matrix b;
  double sigma_w = 0.0;
  double sigma_u = 0.0;
  if (preset == "double_integrator") {
    const LtiSystem di = LtiSystem::double_integrator();
    a = di.a();
    b = di.b();
    sigma_w = di.sigma_w();
    sigma_u = di.sigma_u();
  } else if (preset == "rotation") {
    const LtiSystem rot = LtiSystem::rotation(f.real("angle", 0.1), 1.0);
    a = rot.a();
    b = rot.b();
    sigma_w = 1.0;
  } else {
    const io::Json* ja = f.find("A");
    if (ja == nullptr) fail("system.A", "required when no preset is given");
    a = parse_rows(*ja, "system.A", false);
    if (const io::Json* jb = f.find("B")) {
      b = parse_rows(*jb, "system.B", true);
      if (b.size() == 0) b.resize(a.rows(), 0);
    } else {
      b.resize(a.rows(), 0);
    }
  }
  if (!preset.empty() && (f.has("A") || f.has("B"))) {
    fail("system.preset", "cannot be combined with explicit A or B");
  }
  sigma_w = f.real("sigma_w", sigma_w);
  sigma_u = f.real("sigma_u", sigma_u);
  f.finish();
  try {
    return LtiSystem(a, b, sigma_w, sigma_u);
  } catch (const Error& e) {
    fail("system", e.what());
  }
}

void check_grid(const std::vector<double>& grid, const std::string& field) {
  if (grid.empty()) fail(field, "grid is empty");
  for (double g : grid) {
    if (!(g >= 1.0) || g != std::floor(g)) fail(field, "grid values must be positive integers");
  }
}

} // namespace

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  try {
    cfg.raw = io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  Fields root(cfg.raw, "");

  const io::Json* schema = root.find("schema");
  if (schema == nullptr) fail("schema", "missing (expected 1)");
  if (!schema->is_number_integer() || schema->get<long long>() != 1) fail("schema", "unsupported version (expected 1)");

  const io::Json* seed = root.find("seed");
  if (seed == nullptr) fail("seed", "missing; every run needs an explicit seed");
  if (!seed->is_number_unsigned()) fail("seed", "must be a non-negative integer");
  cfg.seed = seed->get<std::uint64_t>();

  cfg.threads = static_cast<unsigned>(root.count("threads", 1));
  cfg.delta = root.real("delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) fail("delta", "must lie in (0, 1]");

  if (const io::Json* sys = root.find("system")) {
    cfg.system = parse_system(*sys);
  }

  if (const io::Json* data = root.find("data")) {
    Fields f(*data, "data");
    cfg.data.mode = f.choice("mode", cfg.data.mode, {"batch", "single"});
    cfg.data.n = f.count("N", cfg.data.n);
    cfg.data.horizon = f.count("T", cfg.data.horizon);
    cfg.data.autonomous = f.flag("autonomous", false);
    f.finish();
    if (cfg.data.autonomous && cfg.data.mode != "single") fail("data.autonomous", "only valid with mode \"single\"");
  }

  cfg.estimator = root.choice("estimator", cfg.estimator, {"last_step", "pooled"});
  if (const io::Json* bounds = root.find("bounds")) {
    if (!bounds->is_array()) fail("bounds", "must be a list");
    for (const auto& b : *bounds) {
      if (!b.is_string()) fail("bounds", "entries must be strings");
      const auto s = b.get<std::string>();
      if (s != "theory" && s != "ellipsoid" && s != "single_traj" && s != "lwm") {
        fail("bounds", "unknown bound '" + s + "' (expected theory, ellipsoid, single_traj, lwm)");
      }
      cfg.bounds.push_back(s);
    }
  }
  cfg.alphas = root.reals("alpha", cfg.alphas);
  if (cfg.alphas.empty()) fail("alpha", "needs at least one value");
  for (double a : cfg.alphas) {
    if (!(a > 0.0)) fail("alpha", "values must be positive");
  }
  cfg.b_source = root.choice("b_source", cfg.b_source, {"estimate", "true"});

  if (const io::Json* boot = root.find("bootstrap")) {
    Fields f(*boot, "bootstrap");
    cfg.bootstrap.enabled = f.flag("enabled", true);
    cfg.bootstrap.trials = f.count("M", cfg.bootstrap.trials);
    f.finish();
  }

  if (const io::Json* cov = root.find("coverage")) {
    Fields f(*cov, "coverage");
    CoverageSettings c;
    c.scenario = f.choice("scenario", "",
                          {"scalar_theorem", "matrix_theorem", "ellipsoid", "single_traj_cert", "snm_uniform",
                           "bootstrap", "lwm", "cross_term", "min_eig"});
    if (c.scenario.empty()) fail("coverage.scenario", "missing");
    c.grid = f.reals("grid", {});
    check_grid(c.grid, "coverage.grid");
    c.replicates = f.count("replicates", c.replicates);
    c.horizon = f.count("horizon", cfg.data.horizon);
    c.alpha = f.real("alpha", cfg.alphas.front());
    if (!(c.alpha > 0.0)) fail("coverage.alpha", "must be positive");
    c.use_true_b = f.flag("use_true_b", cfg.b_source == "true");
    c.trials = f.count("M", cfg.bootstrap.trials);
    c.regularizer = f.real("regularizer", c.regularizer);
    c.n = f.count("n", c.n);
    c.m = f.count("m", c.m);
    f.finish();
    cfg.coverage = c;
  }

  if (const io::Json* fig = root.find("figure")) {
    Fields f(*fig, "figure");
    cfg.figure.runs = f.count("runs", cfg.figure.runs);
    cfg.figure.t_grid = f.reals("T_grid", cfg.figure.t_grid);
    check_grid(cfg.figure.t_grid, "figure.T_grid");
    cfg.figure.n_grid = f.reals("N_grid", cfg.figure.n_grid);
    check_grid(cfg.figure.n_grid, "figure.N_grid");
    cfg.figure.horizon = f.count("horizon", cfg.figure.horizon);
    cfg.figure.trials = f.count("M", cfg.figure.trials);
    cfg.figure.alpha = f.real("alpha", cfg.figure.alpha);
    if (!(cfg.figure.alpha > 0.0)) fail("figure.alpha", "must be positive");
    f.finish();
  }

  root.finish();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path));
}

} // namespace sysid::cli
