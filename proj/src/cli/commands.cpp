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
#include "sysid/cli/commands.hpp"

#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "sysid/bootstrap.hpp"
#include "sysid/cert_bounds.hpp"
#include "sysid/cli/svg.hpp"
#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/io.hpp"
#include "sysid/montecarlo.hpp"
#include "sysid/parallel.hpp"
#include "sysid/rng.hpp"
#include "sysid/theory_bounds.hpp"

namespace sysid::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

// Computation stage reported alongside an error.
thread_local const char* g_stage = "setup";

struct Stage {
  explicit Stage(const char* name) { g_stage = name; }
};

void prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw Error(ErrorCode::Io, "cannot create output directory '" + out.string() + "'");
  }
}

fs::path emit(Paths& written, const fs::path& path, std::string_view content) {
  io::write_text(path, content);
  written.push_back(path);
  return path;
}

// Explicitly requested but inapplicable bounds are config errors; with no
// request every applicable bound runs.
bool wanted(const ScenarioConfig& cfg, const std::string& name, bool applicable, const char* why) {
  if (cfg.bounds.empty()) return applicable;
  if (std::find(cfg.bounds.begin(), cfg.bounds.end(), name) == cfg.bounds.end()) return false;
  if (!applicable) {
    throw Error(ErrorCode::Config, "field 'bounds': '" + name + "' " + why);
  }
  return true;
}

RowMatrix leading_columns(const RowMatrix& z, std::size_t cols) {
  return z.leftCols(static_cast<Eigen::Index>(cols));
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name) {
  return rng::derive_key(seed, {rng::hash_name(name), static_cast<std::uint64_t>(rng::Tag::Auxiliary)});
}

SingleOptions single_options(const ScenarioConfig& cfg) {
  SingleOptions opts;
  opts.autonomous = cfg.data.autonomous;
  return opts;
}

Json certify_batch(const ScenarioConfig& cfg, const fs::path& out, Paths& written) {
  const LtiSystem& sys = cfg.system;
  Json bundle;
  g_stage = "simulate";
  const TrajectoryBatch batch = simulate_batch(sys, cfg.data.n, cfg.data.horizon, cfg.seed, cfg.threads);
  emit(written, out / "trajectories.csv", io::batch_csv(batch));
  bundle["data"] = io::batch_envelope(batch, sys);

  wanted(cfg, "single_traj", false, "needs data.mode \"single\"");
  wanted(cfg, "lwm", false, "needs data.mode \"single\" with autonomous data");

  // With sigma_u = 0 the input columns are identically zero: A is still
  // identifiable, B is not, and every B bound is flagged.
  const bool zero_u = sys.n_u() > 0 && !(sys.sigma_u() > 0.0);
  const std::size_t n_u = zero_u ? 0 : sys.n_u();
  const std::string zero_u_note = "ZeroSigmaU: sigma_u = 0, input columns carry no information";

  g_stage = "estimate";
  const bool last_step = cfg.estimator == "last_step";
  RegressionData data = last_step ? last_step_data(batch) : pooled_data(batch);
  if (zero_u) {
    data.z = leading_columns(data.z, sys.n_x());
  }
  const Estimate est = ols_fit(data, sys.n_x(), n_u, zero_u ? sys.a() : sys.theta());
  bundle["estimator"] = cfg.estimator;
  bundle["estimate"] = io::estimate_json(est);
  if (zero_u) {
    bundle["estimate"]["inputs_dropped"] = zero_u_note;
  }

  Json certs = Json::object();
  const char* needs_last_step = "certifies the last_step estimator (set estimator to \"last_step\")";
  if (wanted(cfg, "theory", last_step, needs_last_step)) {
    g_stage = "theory bounds";
    const Matrix cov = covariate_covariance(sys, cfg.data.horizon - 1);
    const MatrixErrorBounds b = matrix_error_bounds(min_eigenvalue(cov), sys.sigma_w(), sys.sigma_u(), sys.n_x(),
                                                    sys.n_u(), cfg.data.n, cfg.delta);
    Json theory{{"eps_A", io::certificate_json(b.eps_a)}, {"eps_B", io::certificate_json(b.eps_b)}};
    if (sys.n_x() == 1) {
      theory["scalar"] = io::certificate_json(
          scalar_error_bound(sys.sigma_w(), std::sqrt(cov(0, 0)), cfg.data.n, cfg.delta));
    }
    certs["theory"] = std::move(theory);
  }
  if (wanted(cfg, "ellipsoid", last_step, needs_last_step)) {
    g_stage = "confidence ellipsoid";
    const EllipsoidCertificate ell = confidence_ellipsoid(data.z, sys.n_x(), sys.sigma_w(), cfg.delta);
    certs["ellipsoid"] = io::ellipsoid_json(ell, block_spectral_bounds(ell));
    if (zero_u) {
      certs["ellipsoid"]["eps_B"] = "inf";
      certs["ellipsoid"]["violated_condition"] = zero_u_note;
    }
  }
  bundle["certificates"] = std::move(certs);

  if (cfg.bootstrap.enabled) {
    g_stage = "bootstrap";
    if (zero_u) {
      bundle["bootstrap"] = Json{{"skipped", zero_u_note}};
    } else {
      const Estimate pooled = ols_batch(batch, {.pool_all_steps = true}, &sys);
      BootstrapConfig bc;
      bc.trials = cfg.bootstrap.trials;
      bc.delta = cfg.delta;
      bc.seed = stream_seed(cfg.seed, "bootstrap");
      bc.threads = cfg.threads;
      const BootstrapResult boot =
          bootstrap_eps(batch, pooled.a_hat(), pooled.b_hat(), sys.sigma_w(), sys.sigma_u(), bc);
      Json j = io::bootstrap_json(boot);
      j["estimate"] = io::estimate_json(pooled);
      bundle["bootstrap"] = std::move(j);
      emit(written, out / "bootstrap.csv", io::bootstrap_csv(boot));
    }
  }
  return bundle;
}

Json certify_single(const ScenarioConfig& cfg, const fs::path& out, Paths& written) {
  const LtiSystem& sys = cfg.system;
  if (cfg.bootstrap.enabled) {
    throw Error(ErrorCode::Config, "field 'bootstrap.enabled': the bootstrap needs data.mode \"batch\"");
  }
  const bool autonomous = cfg.data.autonomous || sys.n_u() == 0;
  wanted(cfg, "theory", false, "needs data.mode \"batch\"");
  wanted(cfg, "ellipsoid", false, "needs data.mode \"batch\"");

  Json bundle;
  g_stage = "simulate";
  SingleOptions opts = single_options(cfg);
  opts.autonomous = autonomous;
  const SingleTrajectory traj = simulate_single(sys, cfg.data.horizon, cfg.seed, opts);
  emit(written, out / "trajectories.csv", io::single_csv(traj));
  bundle["data"] = io::single_envelope(traj, sys);

  g_stage = "estimate";
  const SingleMode mode = autonomous ? SingleMode::Autonomous : SingleMode::Controlled;
  const Estimate est = ols_single_traj(traj, mode, &sys);
  bundle["estimator"] = autonomous ? "single_autonomous" : "single";
  bundle["estimate"] = io::estimate_json(est);

  Json certs = Json::object();
  if (wanted(cfg, "single_traj", !autonomous, "needs a controlled (non-autonomous) trajectory")) {
    g_stage = "single-trajectory certificate";
    const RegressionData data = single_traj_data(traj, mode);
    SingleTrajInputs in;
    in.b = cfg.b_source == "true" ? sys.b() : est.b_hat();
    in.b_source = cfg.b_source;
    in.sigma_u = sys.sigma_u();
    in.sigma_w = sys.sigma_w();
    Json sweep = Json::array();
    for (double alpha : cfg.alphas) {
      sweep.push_back(io::single_traj_json(single_traj_cert(data.z, in, alpha, cfg.delta)));
    }
    certs["single_traj"] = std::move(sweep);
  }
  if (wanted(cfg, "lwm", autonomous, "needs an autonomous trajectory (data.autonomous)")) {
    g_stage = "lwm bound";
    certs["lwm"] = io::certificate_json(lwm_system_bound(sys.a(), sys.sigma_w(), cfg.data.horizon, cfg.delta));
  }
  bundle["certificates"] = std::move(certs);
  return bundle;
}

mc::Scenario make_scenario(const ScenarioConfig& cfg, const CoverageSettings& c) {
  const LtiSystem& sys = cfg.system;
  const std::string& id = c.scenario;
  if (id == "scalar_theorem") return mc::scalar_theorem_scenario(sys, c.horizon, cfg.delta);
  if (id == "matrix_theorem") return mc::matrix_theorem_scenario(sys, c.horizon, cfg.delta);
  if (id == "ellipsoid") return mc::ellipsoid_scenario(sys, c.horizon, cfg.delta);
  if (id == "single_traj_cert") return mc::single_traj_scenario(sys, c.alpha, cfg.delta, c.use_true_b);
  if (id == "snm_uniform") {
    if (sys.n_x() != 1) {
      throw Error(ErrorCode::Config, "field 'system': snm_uniform needs a scalar system");
    }
    return mc::snm_uniform_scenario(sys.a()(0, 0), sys.sigma_w(), c.regularizer, cfg.delta);
  }
  if (id == "bootstrap") return mc::bootstrap_scenario(sys, c.horizon, c.trials, cfg.delta);
  if (id == "lwm") return mc::lwm_scenario(sys, cfg.delta);
  if (id == "cross_term") return mc::cross_term_scenario(c.n, c.m, cfg.delta);
  if (id == "min_eig") return mc::min_eig_scenario(c.n, cfg.delta);
  throw Error(ErrorCode::Config, "field 'coverage.scenario': unknown scenario '" + id + "'");
}

// --- figure ----------------------------------------------------------------

struct Panel {
  std::string name;
  std::string title;
  std::string x_label;
  std::vector<std::string> series;                        // column names
  std::function<std::vector<double>(double x, std::uint64_t seed)> run;  // one value per series
  std::vector<double> grid;
};

std::string panel_csv(const std::vector<Series>& series) {
  std::string out = "x,series,q1,median,q3\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out += io::format_double(s.x[i]) + "," + s.name + "," + io::format_double(s.q1[i]) + "," +
             io::format_double(s.median[i]) + "," + io::format_double(s.q3[i]) + "\n";
    }
  }
  return out;
}

void render_panel(const Panel& panel, const ScenarioConfig& cfg, const fs::path& out, Paths& written) {
  const std::size_t runs = cfg.figure.runs;
  std::vector<Series> series(panel.series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    series[k].name = panel.series[k];
    series[k].dashed = panel.series[k].rfind("error_", 0) == 0;
  }
  for (double x : panel.grid) {
    std::vector<std::vector<double>> values(runs);
    parallel_for(runs, cfg.threads, [&](std::size_t r) {
      values[r] = panel.run(x, mc::replicate_seed(cfg.seed, "figure_" + panel.name, x, r));
    });
    for (std::size_t k = 0; k < series.size(); ++k) {
      std::vector<double> column;
      for (const auto& v : values) column.push_back(v[k]);
      const mc::Quantiles q = mc::quantiles(column);
      series[k].x.push_back(x);
      series[k].q1.push_back(q.q1);
      series[k].median.push_back(q.median);
      series[k].q3.push_back(q.q3);
    }
  }
  emit(written, out / ("figure_" + panel.name + ".csv"), panel_csv(series));
  emit(written, out / ("figure_" + panel.name + ".svg"),
       band_chart_svg(panel.title, panel.x_label, "spectral-norm error / bound", series));
}

} // namespace

Paths cmd_simulate(const ScenarioConfig& cfg, const fs::path& out) {
  Stage st("simulate");
  prepare(out);
  Paths written;
  Json envelope;
  if (cfg.data.mode == "batch") {
    const TrajectoryBatch batch = simulate_batch(cfg.system, cfg.data.n, cfg.data.horizon, cfg.seed, cfg.threads);
    emit(written, out / "trajectories.csv", io::batch_csv(batch));
    envelope = io::batch_envelope(batch, cfg.system);
  } else {
    SingleOptions opts = single_options(cfg);
    opts.autonomous = opts.autonomous || cfg.system.n_u() == 0;
    const SingleTrajectory traj = simulate_single(cfg.system, cfg.data.horizon, cfg.seed, opts);
    emit(written, out / "trajectories.csv", io::single_csv(traj));
    envelope = io::single_envelope(traj, cfg.system);
  }
  envelope["csv"] = "trajectories.csv";
  envelope["config"] = cfg.raw;
  emit(written, out / "trajectories.json", io::dump(envelope));
  return written;
}

Paths cmd_certify(const ScenarioConfig& cfg, const fs::path& out) {
  Stage st("certify");
  prepare(out);
  Paths written;
  Json bundle{{"config", cfg.raw}, {"system", io::system_json(cfg.system)}, {"delta", cfg.delta}};
  const Json body = cfg.data.mode == "batch" ? certify_batch(cfg, out, written) : certify_single(cfg, out, written);
  bundle.update(body);
  emit(written, out / "certify.json", io::dump(bundle));
  return written;
}

Paths cmd_coverage(const ScenarioConfig& cfg, const fs::path& out) {
  Stage st("coverage");
  if (!cfg.coverage) {
    throw Error(ErrorCode::Config, "field 'coverage': missing");
  }
  const CoverageSettings& c = *cfg.coverage;
  if (c.grid.empty()) {
    throw Error(ErrorCode::Config, "field 'coverage.grid': grid is empty");
  }
  prepare(out);
  const mc::Scenario scenario = make_scenario(cfg, c);
  g_stage = "coverage replicates";
  std::vector<mc::CoverageReport> reports =
      mc::coverage_experiment(scenario, c.grid, c.replicates, cfg.seed, cfg.threads);
  if (c.grid.size() >= 3) {
    mc::attach_rate_slopes(reports);
  }

  Paths written;
  const std::string stem = "coverage_" + scenario.id;
  for (const auto& target : scenario.targets) {
    emit(written, out / (stem + "_" + target + ".csv"), io::coverage_detail_csv(reports, target));
  }
  emit(written, out / (stem + "_summary.csv"), io::coverage_summary_csv(reports));
  const Json summary{{"scenario", scenario.id},
                     {"targets", scenario.targets},
                     {"delta", scenario.delta},
                     {"replicates", c.replicates},
                     {"master_seed", cfg.seed},
                     {"config", cfg.raw},
                     {"summary", io::coverage_summary_json(reports)}};
  emit(written, out / (stem + ".json"), io::dump(summary));
  return written;
}

Paths cmd_figure(const ScenarioConfig& cfg, const fs::path& out) {
  Stage st("figure");
  prepare(out);
  const LtiSystem sys = cfg.system;
  const FigureSettings fig = cfg.figure;
  const double delta = cfg.delta;
  const bool true_b = cfg.b_source == "true";
  Paths written;

  Panel single;
  single.name = "single_traj";
  single.title = "Single-trajectory certificate";
  single.x_label = "trajectory length T";
  single.series = {"bound_theta", "error_theta"};
  single.grid = fig.t_grid;
  single.run = [&](double x, std::uint64_t seed) {
    const SingleTrajectory traj = simulate_single(sys, static_cast<std::size_t>(x), seed);
    const Estimate est = ols_single_traj(traj, SingleMode::Controlled, &sys);
    SingleTrajInputs in;
    in.b = true_b ? sys.b() : est.b_hat();
    in.b_source = cfg.b_source;
    in.sigma_u = sys.sigma_u();
    in.sigma_w = sys.sigma_w();
    const RegressionData data = single_traj_data(traj, SingleMode::Controlled);
    const SingleTrajCertificate cert = single_traj_cert(data.z, in, fig.alpha, delta);
    return std::vector<double>{cert.bound.value, est.errors->theta};
  };

  Panel ellipsoid;
  ellipsoid.name = "ellipsoid";
  ellipsoid.title = "Confidence-ellipsoid bounds";
  ellipsoid.x_label = "independent rollouts N";
  ellipsoid.series = {"bound_A", "bound_B", "error_A", "error_B"};
  ellipsoid.grid = fig.n_grid;
  ellipsoid.run = [&](double x, std::uint64_t seed) {
    const TrajectoryBatch batch = simulate_batch(sys, static_cast<std::size_t>(x), fig.horizon, seed);
    const RegressionData data = last_step_data(batch);
    const Estimate est = ols_fit(data, sys.n_x(), sys.n_u(), sys.theta());
    const BlockBounds b = block_spectral_bounds(confidence_ellipsoid(data.z, sys.n_x(), sys.sigma_w(), delta));
    return std::vector<double>{b.eps_a, b.eps_b, est.errors->a, est.errors->b};
  };

  Panel boot;
  boot.name = "bootstrap";
  boot.title = "Bootstrap estimates";
  boot.x_label = "independent rollouts N";
  boot.series = {"bound_A", "bound_B", "error_A", "error_B"};
  boot.grid = fig.n_grid;
  boot.run = [&](double x, std::uint64_t seed) {
    const TrajectoryBatch batch = simulate_batch(sys, static_cast<std::size_t>(x), fig.horizon, seed);
    const Estimate est = ols_batch(batch, {.pool_all_steps = true}, &sys);
    BootstrapConfig bc;
    bc.trials = fig.trials;
    bc.delta = delta;
    bc.seed = stream_seed(seed, "bootstrap");
    const BootstrapResult r = bootstrap_eps(batch, est.a_hat(), est.b_hat(), sys.sigma_w(), sys.sigma_u(), bc);
    return std::vector<double>{r.eps_a, r.eps_b, est.errors->a, est.errors->b};
  };

  g_stage = "figure: single-trajectory panel";
  render_panel(single, cfg, out, written);
  g_stage = "figure: ellipsoid panel";
  render_panel(ellipsoid, cfg, out, written);
  g_stage = "figure: bootstrap panel";
  render_panel(boot, cfg, out, written);
  return written;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite-sample system identification: simulate, certify, check coverage, draw figures"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
  };
  Options opts;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"simulate", "Simulate trajectories and write them as CSV + JSON envelope"},
      {"certify", "Estimate from simulated data and emit every applicable certificate"},
      {"coverage", "Monte Carlo coverage of one bound over a grid"},
      {"figure", "Quartile-band charts of certificates and bootstrap estimates"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Scenario config (JSON, schema 1)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory")->required();
    sub->add_option("--seed", opts.seed, "Override the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  g_stage = "config";
  try {
    ScenarioConfig cfg = load_config(opts.config);
    if (opts.seed) {
      cfg.seed = *opts.seed;
      cfg.raw["seed"] = *opts.seed;
    }
    Paths written;
    if (command == "simulate") written = cmd_simulate(cfg, opts.out);
    else if (command == "certify") written = cmd_certify(cfg, opts.out);
    else if (command == "coverage") written = cmd_coverage(cfg, opts.out);
    else written = cmd_figure(cfg, opts.out);
    for (const auto& p : written) {
      std::cout << p.string() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sysid " << command << ": error in stage '" << g_stage << "': " << e.what() << "\n";
    return 1;
  }
}

} // namespace sysid::cli
