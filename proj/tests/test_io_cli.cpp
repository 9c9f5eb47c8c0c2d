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
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "sysid/cli/commands.hpp"
#include "sysid/cli/config.hpp"
#include "sysid/cli/svg.hpp"
#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/io.hpp"

using namespace sysid;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("sysid_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

private:
  fs::path path_;
};

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

ErrorCode config_error(const std::string& text, std::string* message = nullptr) {
  try {
    cli::parse_config(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return ErrorCode::Io;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sysid");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

} // namespace

// ---------------------------------------------------------------------------
// io

TEST(Io, DoubleFormatting) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(io::format_double(std::nan("")), "nan");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
    EXPECT_EQ(io::parse_double(io::format_double(v), "v"), v);
  }
  EXPECT_THROW(io::parse_double("1.5x", "v"), Error);
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Io, MatrixJsonRoundTrip) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, std::numeric_limits<double>::infinity();
  const io::Json j = io::matrix_json(m);
  EXPECT_EQ(j["rows"], 2);
  EXPECT_EQ(j["data"][1], 2.0);  // row-major
  const Matrix back = io::matrix_from_json(io::Json::parse(j.dump()), "m");
  EXPECT_EQ(back(1, 2), std::numeric_limits<double>::infinity());
  EXPECT_EQ(back.topLeftCorner(2, 2), m.topLeftCorner(2, 2));
}

TEST(Io, BatchCsvRoundTripIsBitExact) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch b = simulate_batch(di, 10, 6, 1);
  const std::string csv = io::batch_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "experiment,t,x_0,x_1,u_0");
  EXPECT_EQ(count_lines(csv), 71u);
  const TrajectoryBatch back = io::read_batch_csv(csv, b.seed);
  ASSERT_EQ(back.records.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back.records[i].states, b.records[i].states);
    EXPECT_EQ(back.records[i].inputs, b.records[i].inputs);
  }
  EXPECT_EQ(ols_batch(back).theta_hat, ols_batch(b).theta_hat);
  EXPECT_EQ(io::batch_csv(back), csv);
}

TEST(Io, SingleCsvRoundTrip) {
  const SingleTrajectory s = simulate_single(LtiSystem::double_integrator(), 20, 4);
  const std::string csv = io::single_csv(s);
  const std::string last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_EQ(last.back(), '\n');
  EXPECT_EQ(last[last.size() - 2], ',');  // trailing empty u cell
  const SingleTrajectory back = io::read_single_csv(csv, 4);
  EXPECT_EQ(back.states, s.states);
  EXPECT_EQ(back.inputs, s.inputs);

  SingleOptions opts;
  opts.autonomous = true;
  const SingleTrajectory a = simulate_single(LtiSystem::rotation(0.1, 1.0), 5, 4, opts);
  const std::string acsv = io::single_csv(a);
  EXPECT_EQ(acsv.substr(0, acsv.find('\n')), "experiment,t,x_0,x_1");
  EXPECT_EQ(io::read_single_csv(acsv, 4).states, a.states);
}

TEST(Io, MalformedCsvIsRejected) {
  EXPECT_THROW(io::read_batch_csv("foo,bar\n", 0), Error);
  EXPECT_THROW(io::read_batch_csv("experiment,t,x_0\n0,1,0.5\n", 0), Error);  // starts at t = 1
  EXPECT_THROW(io::read_batch_csv("experiment,t,x_0\n0,0,abc\n", 0), Error);
  EXPECT_THROW(io::read_batch_csv("experiment,t,x_0\n0,0,1,2\n", 0), Error);
}

TEST(Io, CertificateJsonOmitsEmptyCondition) {
  BoundCertificate c;
  c.value = 1.5;
  c.delta = 0.05;
  c.source = "x";
  EXPECT_FALSE(io::certificate_json(c).contains("violated_condition"));
  c.precondition_ok = false;
  c.violated_condition = "N too small";
  EXPECT_EQ(io::certificate_json(c)["violated_condition"], "N too small");
}

TEST(Io, BootstrapCsv) {
  BootstrapResult r;
  r.samples = {{0.5, 0.25}, {std::numeric_limits<double>::infinity(), 1}};
  EXPECT_EQ(io::bootstrap_csv(r), "trial,eps_A_tilde,eps_B_tilde\n0,0.5,0.25\n1,inf,1\n");
}

TEST(Svg, DegenerateSeriesRender) {
  cli::Series s;
  s.name = "bound";
  s.x = {100};
  s.q1 = {0.5};
  s.median = {0.6};
  s.q3 = {0.7};
  const std::string svg = cli::band_chart_svg("t", "x", "y", {s});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  cli::Series empty;
  empty.name = "e";
  empty.x = {1};
  empty.q1 = empty.median = empty.q3 = {std::numeric_limits<double>::infinity()};
  EXPECT_NO_THROW(cli::band_chart_svg("t", "x", "y", {empty}));
}

// ---------------------------------------------------------------------------
// config

TEST(Config, MinimalAndDefaults) {
  const cli::ScenarioConfig c = cli::parse_config(R"({"schema": 1, "seed": 5})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.system.n_x(), 2u);
  EXPECT_EQ(c.data.mode, "batch");
  EXPECT_EQ(c.delta, 0.05);
  EXPECT_FALSE(c.coverage.has_value());
}

TEST(Config, ErrorsNameTheField) {
  std::string msg;
  EXPECT_EQ(config_error(R"({"schema": 1})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'seed'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"seed": 1})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'schema'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 2, "seed": 1})"), ErrorCode::Config);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "colour": 3})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'colour'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "data": {"N": 5, "TT": 3}})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'data.TT'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "delta": 0})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'delta'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "system": {"preset": "cartpole"}})", &msg), ErrorCode::Config);
  EXPECT_NE(msg.find("'system.preset'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "coverage": {"scenario": "lwm", "grid": []}})", &msg),
            ErrorCode::Config);
  EXPECT_NE(msg.find("'coverage.grid'"), std::string::npos);
  EXPECT_EQ(config_error(R"({"schema": 1, "seed": 1, "system": {"A": [[1, 2], [3]]}})"), ErrorCode::Config);
  EXPECT_EQ(config_error("{not json"), ErrorCode::Config);
}

TEST(Config, InlineSystem) {
  const cli::ScenarioConfig c = cli::parse_config(
      R"({"schema": 1, "seed": 2, "system": {"A": [[0.8]], "B": [[1]], "sigma_w": 1, "sigma_u": 0.5},
          "alpha": [0.5, 1, 2], "bootstrap": {"M": 10}})");
  EXPECT_EQ(c.system.a()(0, 0), 0.8);
  EXPECT_EQ(c.system.sigma_u(), 0.5);
  EXPECT_EQ(c.alphas.size(), 3u);
  EXPECT_TRUE(c.bootstrap.enabled);
  EXPECT_EQ(c.bootstrap.trials, 10u);
}

// ---------------------------------------------------------------------------
// commands

TEST(Cli, SimulateWritesRowsAndIsReproducible) {
  TempDir dir;
  const auto cfg = cli::parse_config(
      R"({"schema": 1, "seed": 1, "system": {"preset": "double_integrator"}, "data": {"N": 10, "T": 6}})");
  cli::cmd_simulate(cfg, dir / "a");
  cli::cmd_simulate(cfg, dir / "b");
  const std::string csv = io::read_text(dir / "a" / "trajectories.csv");
  EXPECT_EQ(count_lines(csv) - 1, 70u);
  EXPECT_EQ(csv, io::read_text(dir / "b" / "trajectories.csv"));
  const auto env = io::Json::parse(io::read_text(dir / "a" / "trajectories.json"));
  EXPECT_EQ(env["seed"], 1);
  EXPECT_EQ(env["system"]["sigma_w"], 0.1);
}

TEST(Cli, SeedFlagOverridesConfig) {
  TempDir dir;
  io::write_text(dir / "c.json", R"({"schema": 1, "seed": 1, "data": {"N": 3, "T": 2}})");
  ASSERT_EQ(run_cli({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "a").string()}), 0);
  ASSERT_EQ(run_cli({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "b").string(), "--seed",
                     "2"}),
            0);
  EXPECT_NE(io::read_text(dir / "a" / "trajectories.csv"), io::read_text(dir / "b" / "trajectories.csv"));
  EXPECT_EQ(io::Json::parse(io::read_text(dir / "b" / "trajectories.json"))["seed"], 2);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  io::write_text(dir / "bad.json", R"({"schema": 1})");
  EXPECT_NE(run_cli({"simulate", "--config", (dir / "bad.json").string(), "--out", (dir / "o").string()}), 0);
  EXPECT_NE(run_cli({"simulate", "--out", (dir / "o").string()}), 0);
  EXPECT_NE(run_cli({"explode", "--config", (dir / "bad.json").string()}), 0);
}

TEST(Cli, CertifyBatchBundle) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 3, "data": {"N": 600, "T": 6},
                                         "bootstrap": {"enabled": true, "M": 200}})");
  cli::cmd_certify(cfg, dir.path());
  const auto j = io::Json::parse(io::read_text(dir / "certify.json"));
  EXPECT_TRUE(j["certificates"]["theory"]["eps_A"]["precondition_ok"].get<bool>());
  EXPECT_TRUE(j["certificates"].contains("ellipsoid"));
  EXPECT_EQ(j["certificates"]["ellipsoid"]["infinite_directions"], 0);
  EXPECT_EQ(j["bootstrap"]["M"], 200);
  EXPECT_EQ(j["bootstrap"]["eps_A_tilde"].size(), 200u);
  EXPECT_GT(j["bootstrap"]["eps_A"].get<double>(), 0.0);
  EXPECT_EQ(count_lines(io::read_text(dir / "bootstrap.csv")), 201u);

  // Re-ingesting the persisted data reproduces the persisted estimate exactly.
  const TrajectoryBatch back = io::read_batch_csv(io::read_text(dir / "trajectories.csv"), 3);
  const Estimate again = ols_batch(back);
  const Matrix stored = io::matrix_from_json(j["estimate"]["theta_hat"], "theta_hat");
  EXPECT_EQ(again.theta_hat, stored);
}

TEST(Cli, CertifyZeroInputScaleFlagsB) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 3, "system": {"preset": "double_integrator",
                                         "sigma_u": 0}, "data": {"N": 600, "T": 6}})");
  cli::cmd_certify(cfg, dir.path());
  const auto j = io::Json::parse(io::read_text(dir / "certify.json"));
  const auto& eps_b = j["certificates"]["theory"]["eps_B"];
  EXPECT_EQ(eps_b["value"], "inf");
  EXPECT_EQ(eps_b["violated_condition"].get<std::string>().rfind("ZeroSigmaU", 0), 0u);
  EXPECT_TRUE(j["certificates"]["theory"]["eps_A"]["precondition_ok"].get<bool>());
}

TEST(Cli, CertifySingleTrajectory) {
  TempDir dir;
  const auto cfg = cli::parse_config(
      R"({"schema": 1, "seed": 4, "data": {"mode": "single", "T": 1000}, "alpha": [1, 2, 4]})");
  cli::cmd_certify(cfg, dir.path());
  const auto j = io::Json::parse(io::read_text(dir / "certify.json"));
  const auto& sweep = j["certificates"]["single_traj"];
  ASSERT_EQ(sweep.size(), 3u);
  for (const auto& c : sweep) {
    EXPECT_TRUE(c.contains("ordering_margin"));
    EXPECT_TRUE(c.contains("alpha_min"));
  }
  EXPECT_TRUE(sweep[2]["certified"].get<bool>());

  const SingleTrajectory back = io::read_single_csv(io::read_text(dir / "trajectories.csv"), 4);
  EXPECT_EQ(ols_single_traj(back, SingleMode::Controlled).theta_hat,
            io::matrix_from_json(j["estimate"]["theta_hat"], "theta_hat"));
}

TEST(Cli, CertifyAutonomousHasLwm) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 4, "system": {"preset": "rotation", "angle": 0.3},
                                         "data": {"mode": "single", "T": 20000, "autonomous": true}})");
  cli::cmd_certify(cfg, dir.path());
  const auto j = io::Json::parse(io::read_text(dir / "certify.json"));
  EXPECT_TRUE(j["certificates"].contains("lwm"));
  EXPECT_FALSE(j["certificates"].contains("single_traj"));
}

TEST(Cli, InapplicableBoundIsConfigError) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 4, "bounds": ["lwm"]})");
  try {
    cli::cmd_certify(cfg, dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    EXPECT_NE(std::string(e.what()).find("'bounds'"), std::string::npos);
  }
}

TEST(Cli, CoverageFiles) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 9, "delta": 0.1,
      "system": {"A": [[0.8]], "B": [[1]], "sigma_w": 1, "sigma_u": 1},
      "coverage": {"scenario": "scalar_theorem", "grid": [150, 200], "replicates": 100, "horizon": 3}})");
  const auto written = cli::cmd_coverage(cfg, dir.path());
  EXPECT_EQ(written.size(), 3u);
  const std::string detail = io::read_text(dir / "coverage_scalar_theorem_a.csv");
  EXPECT_EQ(count_lines(detail), 201u);
  EXPECT_EQ(detail.substr(0, detail.find('\n')), "grid_value,replicate,error,bound,covered");
  const auto j = io::Json::parse(io::read_text(dir / "coverage_scalar_theorem.json"));
  EXPECT_EQ(j["config"]["seed"], 9);
  EXPECT_GE(j["summary"][1]["coverage"].get<double>(), 0.9);
}

TEST(Cli, FigureSinglePoint) {
  TempDir dir;
  const auto cfg = cli::parse_config(R"({"schema": 1, "seed": 2,
      "figure": {"runs": 3, "T_grid": [300], "N_grid": [40], "M": 20}})");
  const auto written = cli::cmd_figure(cfg, dir.path());
  EXPECT_EQ(written.size(), 6u);
  for (const char* panel : {"single_traj", "ellipsoid", "bootstrap"}) {
    const std::string csv = io::read_text(dir / ("figure_" + std::string(panel) + ".csv"));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,series,q1,median,q3");
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      ASSERT_EQ(cells.size(), 5u);
      const double q1 = io::parse_double(cells[2], "q1");
      const double med = io::parse_double(cells[3], "median");
      const double q3 = io::parse_double(cells[4], "q3");
      EXPECT_LE(q1, med);
      EXPECT_LE(med, q3);
    }
    EXPECT_TRUE(fs::exists(dir / ("figure_" + std::string(panel) + ".svg")));
  }
}
