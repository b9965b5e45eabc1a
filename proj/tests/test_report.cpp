#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tampc/report.hpp"

using namespace tampc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tampc_test_report_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Drops the named CSV column from every line.
std::string without_column(const std::string& csv, std::size_t column) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t begin = 0;
    for (std::size_t k = 0; k < column; ++k) begin = line.find(',', begin) + 1;
    const std::size_t end = line.find(',', begin);
    out += line.substr(0, begin) + (end == std::string::npos ? "" : line.substr(end + 1)) + '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(R"(
[problem]
name = "test2"
mu = 2.5

[mpc]
variants = ["uniform", "offline", "online-equidistant"]
m = [30, 45]
N = 5
horizon_length = [0.1, 0.2]
theta = 0.4
warm_start = true

[mesh]
coarse = 7
fine = 50

[output]
directory = "out"
)");
  CHECK(c.problem.name == "test2");
  CHECK(c.problem.parameters.at("mu") == 2.5);
  REQUIRE(c.variants.size() == 3);
  CHECK(c.variants[2].variant == MpcVariant::online);
  CHECK(c.variants[2].equidistant_windows);
  CHECK(c.variants[2].label() == "online-equidistant");
  CHECK(c.m_values == std::vector<std::size_t>{30, 45});
  CHECK(c.N_values == std::vector<std::size_t>{5});
  CHECK(c.horizon_lengths == std::vector<double>{0.1, 0.2});
  CHECK(c.theta == 0.4);
  CHECK(c.warm_start);
  CHECK(c.coarse_cells == 7);
  CHECK(c.fine_cells == 50);
  CHECK(c.output_directory == fs::path("out"));

  CHECK_THROWS_AS((void)parse("[mpc]\nbogus = 1\n"), InvalidArgument);
  CHECK_THROWS_AS((void)parse("[mpc]\nm = 4.5\n"), InvalidArgument);
  CHECK_THROWS_AS((void)parse("[mpc]\ntheta = 0\n"), InvalidArgument);
  CHECK_THROWS_AS((void)parse("[mpc]\nvariants = [\"sideways\"]\n"), InvalidArgument);
  CHECK_THROWS_AS((void)parse("[problem]\nname = \"nope\"\n"), InvalidArgument);
  CHECK_THROWS_AS((void)parse("stray = 1\n"), InvalidArgument);
  CHECK_THROWS_AS((void)load_experiment_config("/nonexistent/config.toml"), InvalidArgument);
}

TEST_CASE("sweep expansion and order") {
  auto c = parse("[mpc]\nvariants = [\"online\", \"uniform\", \"offline\"]\nm = [45, 30]\nN = [9, 5]\nhorizon_length = [0.3, 0.1]\n");
  const auto cases = expand_sweep(c);
  REQUIRE(cases.size() == 12);
  CHECK(cases.front().variant.label() == "offline");
  CHECK(cases.front().N == 5);
  CHECK(cases.front().m == 30);
  CHECK(cases[4].variant.label() == "online");
  CHECK(cases[4].horizon_length.value() == 0.1);
  CHECK(cases[5].horizon_length.value() == 0.3);
  CHECK(cases.back().variant.label() == "uniform");
  CHECK(cases.back().directory_name() == "uniform_N9_m45");
  CHECK(cases[4].directory_name() == "online_N5_T0.1");
}

TEST_CASE("error against the reference") {
  MpcConfig config;
  config.m = 4;
  config.N = 2;
  config.fine_mesh = SpatialMesh(10);
  const auto run = run_mpc(make_zero_problem(), config);
  CHECK(compute_error(run, make_zero_problem()).value() == 0.0);
  ProblemSpec one = make_zero_problem();
  one.exact_y = [](double, double) { return 1.0; };
  CHECK(compute_error(run, one).value() == doctest::Approx(1.0).epsilon(1e-12));
  ProblemSpec none = make_zero_problem();
  none.exact_y.reset();
  CHECK_FALSE(compute_error(run, none).has_value());

  SweepRow row = summarize({{MpcVariant::uniform, false}, 4, 2, std::nullopt}, run, none);
  std::ostringstream out;
  write_summary_row(out, row);
  CHECK(out.str().find("no reference") != std::string::npos);
  CHECK(row.sweep_case.horizon_length.value() == doctest::Approx(0.25));
}

TEST_CASE("failures are recorded in the status column") {
  SweepRow row;
  row.sweep_case = {{MpcVariant::online, false}, 0, 5, 0.2};
  row.status = "online MPC stagnates at t = 0.5";
  std::ostringstream out;
  write_summary_row(out, row);
  CHECK(out.str() == "online,0,5,0.20000000000000001,,,,,\"online MPC stagnates at t = 0.5\"\n");
}

TEST_CASE("zero-data sweep writes every file and reruns identically") {
  const fs::path dir = scratch("zero");
  auto c = parse("[problem]\nname = \"zero\"\n[mpc]\nvariants = [\"uniform\", \"offline\", \"online\"]\nm = 10\nN = 3\n"
                 "horizon_length = 0.25\n[mesh]\nfine = 20\n");
  c.output_directory = dir;
  std::vector<SweepRow> rows;
  const auto files = run_experiment(c, &rows);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    CHECK(row.l2_error_y.value() == 0.0);
  }
  CHECK(fs::exists(dir / "offline_N3_m10" / "master_grid.txt"));
  CHECK(fs::exists(dir / "online_N3_T0.25" / "iterations.csv"));
  CHECK(fs::exists(dir / "uniform_N3_m10" / "trajectory.csv"));
  CHECK(files.size() == 3 * 4 + 1 + 1);
  const std::string first = read(dir / "comparison.csv");
  CHECK(first.rfind("variant,m,N,T_bar,l2_error_y,tracking_cost,control_cost,total_wall_time_s,status\n", 0) == 0);
  const std::string trajectory = read(dir / "online_N3_T0.25" / "trajectory.csv");
  const std::string iterations = read(dir / "online_N3_T0.25" / "iterations.csv");

  (void)run_experiment(c);
  CHECK(without_column(read(dir / "comparison.csv"), 7) == without_column(first, 7));
  CHECK(read(dir / "online_N3_T0.25" / "trajectory.csv") == trajectory);
  CHECK(without_column(read(dir / "online_N3_T0.25" / "iterations.csv"), 4) == without_column(iterations, 4));
  fs::remove_all(dir);
}

TEST_CASE("layer problem: offline beats uniform for every horizon") {
  const fs::path dir = scratch("test1");
  auto c = parse("[mpc]\nvariants = [\"uniform\", \"offline\"]\nm = 45\nN = [5, 7, 9, 11]\n");
  c.output_directory = dir;
  std::vector<SweepRow> rows;
  (void)run_experiment(c, &rows);
  REQUIRE(rows.size() == 8);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& offline = rows[k];
    const auto& uniform = rows[k + 4];
    REQUIRE(offline.sweep_case.variant.label() == "offline");
    REQUIRE(uniform.sweep_case.variant.label() == "uniform");
    CHECK(offline.sweep_case.N == uniform.sweep_case.N);
    MESSAGE("N = " << offline.sweep_case.N << ": offline " << *offline.l2_error_y << ", uniform " << *uniform.l2_error_y);
    CHECK(*offline.l2_error_y < *uniform.l2_error_y);
  }
  fs::remove_all(dir);
}

TEST_CASE("unstable problem produces finite rows") {
  const fs::path dir = scratch("test2");
  auto c = parse("[problem]\nname = \"test2\"\n[mpc]\nvariants = [\"uniform\", \"offline\"]\nm = 45\nN = 5\n[mesh]\nfine = 40\n");
  c.output_directory = dir;
  std::vector<SweepRow> rows;
  (void)run_experiment(c, &rows);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    REQUIRE(row.l2_error_y);
    CHECK(std::isfinite(*row.l2_error_y));
    CHECK(*row.l2_error_y < 10.0);
    CHECK(row.control_cost > 0.0);
  }
  fs::remove_all(dir);
}
