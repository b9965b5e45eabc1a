#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tampc/core.hpp"
#include "tampc/mpc.hpp"
#include "tampc/problems.hpp"

namespace tampc {

/// One entry of the `variants` list: an MPC variant plus the online window mode.
struct VariantChoice {
  MpcVariant variant = MpcVariant::uniform;
  bool equidistant_windows = false;

  [[nodiscard]] std::string label() const;
  [[nodiscard]] static VariantChoice parse(const std::string& label);
};

/**
 * Experiment description, read from a TOML-style file:
 *
 *   [problem]  name, epsilon, nu, mu, alpha, t_end
 *   [mpc]      variants, m, N, horizon_length, theta, warm_start
 *   [mesh]     coarse, fine
 *   [output]   directory, seed
 *
 * List-valued keys accept `[a, b, c]` or a single value.
 */
struct ExperimentConfig {
  ProblemDescriptor problem{"test1", {}};
  std::vector<VariantChoice> variants{{MpcVariant::uniform, false}};
  std::vector<std::size_t> m_values{45};
  std::vector<std::size_t> N_values{9};
  std::vector<double> horizon_lengths{0.2};
  double theta = 0.5;
  bool warm_start = false;
  std::size_t coarse_cells = 5;
  std::size_t fine_cells = 100;
  std::filesystem::path output_directory{"results"};
  /// Reserved; every run is deterministic.
  std::uint64_t seed = 0;

  void validate() const;
};

[[nodiscard]] ExperimentConfig parse_experiment_config(std::istream& in);
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// One swept (variant, m, N, T̄) combination.
struct SweepCase {
  VariantChoice variant;
  std::size_t m = 0;
  std::size_t N = 0;
  /// Online only; uniform runs report (N-1) T / m, offline runs leave it empty.
  std::optional<double> horizon_length;

  [[nodiscard]] MpcConfig to_config(const ExperimentConfig& experiment) const;
  [[nodiscard]] std::string directory_name() const;
};

/// Summary of one case; `status` is "ok" or the failure message.
struct SweepRow {
  SweepCase sweep_case;
  std::string status = "ok";
  std::size_t iterations = 0;
  std::optional<double> l2_error_y;
  double tracking_cost = 0.0;
  double control_cost = 0.0;
  double total_wall_time = 0.0;
};

/// Uniform and offline cases span m x N; online cases span T̄ x N. Sorted by (variant, N, m, T̄).
[[nodiscard]] std::vector<SweepCase> expand_sweep(const ExperimentConfig& config);

/// L²(0,T; L²(0,1)) distance of the closed-loop state to exact_y on the run's own grid and mesh.
/// Empty when the problem has no reference solution.
[[nodiscard]] std::optional<double> compute_error(const MpcRun& run, const ProblemSpec& problem);

[[nodiscard]] SweepRow summarize(const SweepCase& sweep_case, const MpcRun& run, const ProblemSpec& problem);

void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SweepRow& row);

/**
 * Runs every case, writing per-case summary.csv, iterations.csv, trajectory.csv
 * and grid.txt (plus master_grid.txt for offline runs) below the output
 * directory, and comparison.csv with a status column at its root. A failing case
 * is recorded and does not stop the sweep. Returns the written files.
 */
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  std::vector<SweepRow>* rows = nullptr);

}  // namespace tampc
