// Command-line front end: adapt-grid, open-loop, mpc, sweep, check.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "tampc/checks.hpp"
#include "tampc/estimator.hpp"
#include "tampc/mpc.hpp"
#include "tampc/openloop.hpp"
#include "tampc/problems.hpp"
#include "tampc/report.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;
constexpr int kCheckFailure = 3;

struct ProblemOptions {
  std::string name = "test1";
  std::map<std::string, double> parameters;

  void attach(CLI::App* app) {
    app->add_option("--problem", name, "registered problem (test1, test2, zero)")->capture_default_str();
    app->add_option("--param", parameters, "problem parameter override, key=value (epsilon, nu, mu, alpha, t_end)")
        ->delimiter(',');
  }
  [[nodiscard]] tampc::ProblemSpec build() const { return tampc::make_problem({name, parameters}); }
};

/// Writes to `path`, or to stdout when the path is empty or "-".
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw tampc::InvalidArgument("cannot write " + path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-adaptive model predictive control of 1D parabolic problems"};
  app.require_subcommand(1);

  // adapt-grid
  auto* adapt = app.add_subcommand("adapt-grid", "estimator-driven time grid for one horizon");
  ProblemOptions adapt_problem;
  adapt_problem.attach(adapt);
  double adapt_start = 0.0;
  std::optional<double> adapt_stop;
  std::size_t adapt_target = 46;
  std::size_t adapt_cells = 5;
  double adapt_theta = 0.5;
  std::string adapt_output;
  std::string adapt_estimates;
  adapt->add_option("--t-start", adapt_start, "left end of the span")->capture_default_str();
  adapt->add_option("--t-stop", adapt_stop, "right end of the span (default: problem end time)");
  adapt->add_option("--target", adapt_target, "number of time instances")->capture_default_str();
  adapt->add_option("--coarse", adapt_cells, "spatial cells of the estimator mesh")->capture_default_str();
  adapt->add_option("--theta", adapt_theta, "Doerfler bulk parameter")->capture_default_str();
  adapt->add_option("-o,--output", adapt_output, "grid file (default stdout)");
  adapt->add_option("--estimates", adapt_estimates, "CSV of the final per-interval estimates");

  // open-loop
  auto* open = app.add_subcommand("open-loop", "solve one discrete optimal control problem");
  ProblemOptions open_problem;
  open_problem.attach(open);
  std::string open_grid;
  std::size_t open_instances = 9;
  std::size_t open_cells = 100;
  std::string open_output;
  open->add_option("--grid", open_grid, "time grid file (default: uniform on [0, T])")->check(CLI::ExistingFile);
  open->add_option("--instances", open_instances, "instances of the uniform grid")->capture_default_str();
  open->add_option("--fine", open_cells, "spatial cells")->capture_default_str();
  open->add_option("-o,--output", open_output, "CSV with t,x,y,u,p (default stdout)");

  // mpc
  auto* mpc = app.add_subcommand("mpc", "one closed-loop MPC run");
  ProblemOptions mpc_problem;
  mpc_problem.attach(mpc);
  std::string mpc_variant = "offline";
  tampc::MpcConfig mpc_config;
  std::size_t mpc_coarse = 5, mpc_fine = 100;
  std::string mpc_dir = "mpc_run";
  mpc->add_option("--variant", mpc_variant, "uniform, offline, online or online-equidistant")->capture_default_str();
  mpc->add_option("-m", mpc_config.m, "instances of the uniform/master grid minus one")->capture_default_str();
  mpc->add_option("-N", mpc_config.N, "instances per horizon")->capture_default_str();
  mpc->add_option("--horizon", mpc_config.horizon_length, "online horizon length")->capture_default_str();
  mpc->add_option("--theta", mpc_config.doerfler_theta, "Doerfler bulk parameter")->capture_default_str();
  mpc->add_option("--coarse", mpc_coarse, "spatial cells for grid adaptation")->capture_default_str();
  mpc->add_option("--fine", mpc_fine, "spatial cells for the open-loop solves")->capture_default_str();
  mpc->add_flag("--warm-start", mpc_config.warm_start, "seed online adaptation with the previous grid");
  mpc->add_option("--output-dir", mpc_dir, "directory for summary, iteration, trajectory and grid files")
      ->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment config file");
  std::string sweep_config;
  sweep->add_option("config", sweep_config, "experiment file with [problem], [mpc], [mesh], [output]")
      ->required()
      ->check(CLI::ExistingFile);

  // check
  auto* check = app.add_subcommand("check", "run the invariant and oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*adapt) {
      const auto problem = adapt_problem.build();
      tampc::AdaptOptions options;
      options.theta = adapt_theta;
      const auto result = tampc::adapt_time_grid_detailed(problem, adapt_start, adapt_stop.value_or(problem.t_end),
                                                          adapt_target, tampc::SpatialMesh(adapt_cells), options);
      emit(adapt_output, [&](std::ostream& out) { tampc::write_time_grid(out, result.grid); });
      if (!adapt_estimates.empty()) {
        const auto solution = tampc::solve_mixed(problem, result.grid, tampc::SpatialMesh(adapt_cells));
        emit(adapt_estimates, [&](std::ostream& out) { tampc::write_csv(out, tampc::estimate(solution)); });
      }
    } else if (*open) {
      const auto problem = open_problem.build();
      const tampc::SpatialMesh mesh(open_cells);
      tampc::TimeGrid grid = tampc::uniform_time_grid(0.0, problem.t_end, open_instances);
      if (!open_grid.empty()) {
        std::ifstream in(open_grid);
        grid = tampc::read_time_grid(in);
      }
      const auto solution = tampc::solve_open_loop(problem, grid, mesh.sample(problem.y0), mesh);
      emit(open_output, [&](std::ostream& out) { tampc::write_csv(out, solution); });
      std::cerr << "cost " << solution.cost << '\n';
    } else if (*mpc) {
      const auto problem = mpc_problem.build();
      const auto choice = tampc::VariantChoice::parse(mpc_variant);
      mpc_config.variant = choice.variant;
      mpc_config.equidistant_windows = choice.equidistant_windows;
      mpc_config.coarse_mesh = tampc::SpatialMesh(mpc_coarse);
      mpc_config.fine_mesh = tampc::SpatialMesh(mpc_fine);
      const auto run = tampc::run_mpc(problem, mpc_config);
      tampc::SweepCase sweep_case{choice, mpc_config.m, mpc_config.N, std::nullopt};
      if (choice.variant == tampc::MpcVariant::online) sweep_case.horizon_length = mpc_config.horizon_length;
      const auto row = tampc::summarize(sweep_case, run, problem);
      const std::filesystem::path dir(mpc_dir);
      std::filesystem::create_directories(dir);
      emit((dir / "summary.csv").string(), [&](std::ostream& out) {
        tampc::write_summary_header(out);
        tampc::write_summary_row(out, row);
      });
      emit((dir / "iterations.csv").string(), [&](std::ostream& out) { tampc::write_iterations_csv(out, run); });
      emit((dir / "trajectory.csv").string(), [&](std::ostream& out) { tampc::write_trajectory_csv(out, run); });
      emit((dir / "grid.txt").string(),
           [&](std::ostream& out) { tampc::write_time_grid(out, run.closed_loop_y.grid()); });
      tampc::write_summary_header(std::cout);
      tampc::write_summary_row(std::cout, row);
    } else if (*sweep) {
      const auto config = tampc::load_experiment_config(sweep_config);
      std::vector<tampc::SweepRow> rows;
      (void)tampc::run_experiment(config, &rows);
      tampc::write_summary_header(std::cout);
      for (const auto& row : rows) tampc::write_summary_row(std::cout, row);
    } else if (*check) {
      const bool ok = tampc::print_check_results(std::cout, tampc::run_property_checks());
      return ok ? 0 : kCheckFailure;
    }
  } catch (const tampc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const tampc::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const tampc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return 0;
}
