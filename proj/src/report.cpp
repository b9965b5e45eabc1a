#include "tampc/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tampc/fem1d.hpp"

namespace tampc {
namespace {

double to_double(const std::string& key, const std::string& text) {
  std::istringstream ss(text);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  if (!(ss >> v) || !(ss >> std::ws).eof()) throw InvalidArgument("config key '" + key + "': not a number: " + text);
  return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v < 0.0 || v != std::floor(v)) throw InvalidArgument("config key '" + key + "': not a count: " + text);
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config key '" + key + "': not a boolean: " + text);
}

std::string single(const std::string& key, const std::vector<std::string>& inputs) {
  if (inputs.size() != 1) throw InvalidArgument("config key '" + key + "' expects a single value");
  return inputs.front();
}

void write_number(std::ostream& out, double v) { out << std::setprecision(17) << v; }

void write_seconds(std::ostream& out, double v) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(3) << v;
  out.flags(flags);
}

}  // namespace

std::string VariantChoice::label() const {
  if (variant == MpcVariant::online && equidistant_windows) return "online-equidistant";
  return to_string(variant);
}

VariantChoice VariantChoice::parse(const std::string& label) {
  if (label == "online-equidistant") return {MpcVariant::online, true};
  return {parse_variant(label), false};
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw InvalidArgument("config: at least one variant is required");
  if (m_values.empty() || N_values.empty() || horizon_lengths.empty()) {
    throw InvalidArgument("config: sweep lists m, N and horizon_length must be non-empty");
  }
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("config: theta must lie in (0, 1]");
  if (coarse_cells < 2 || fine_cells < 2) throw InvalidArgument("config: meshes need at least 2 cells");
  if (output_directory.empty()) throw InvalidArgument("config: output directory is empty");
  (void)make_problem(problem);
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig config;
  config.problem.parameters.clear();
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string section = item.parents.empty() ? "" : item.parents.front();
    const std::string key = section + "." + item.name;
    const auto& inputs = item.inputs;
    if (section == "problem") {
      if (item.name == "name") {
        config.problem.name = single(key, inputs);
      } else {
        config.problem.parameters[item.name] = to_double(key, single(key, inputs));
      }
    } else if (section == "mpc") {
      if (item.name == "variants" || item.name == "variant") {
        config.variants.clear();
        for (const auto& v : inputs) config.variants.push_back(VariantChoice::parse(v));
      } else if (item.name == "m") {
        config.m_values.clear();
        for (const auto& v : inputs) config.m_values.push_back(to_count(key, v));
      } else if (item.name == "N") {
        config.N_values.clear();
        for (const auto& v : inputs) config.N_values.push_back(to_count(key, v));
      } else if (item.name == "horizon_length") {
        config.horizon_lengths.clear();
        for (const auto& v : inputs) config.horizon_lengths.push_back(to_double(key, v));
      } else if (item.name == "theta") {
        config.theta = to_double(key, single(key, inputs));
      } else if (item.name == "warm_start") {
        config.warm_start = to_bool(key, single(key, inputs));
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    } else if (section == "mesh") {
      if (item.name == "coarse") {
        config.coarse_cells = to_count(key, single(key, inputs));
      } else if (item.name == "fine") {
        config.fine_cells = to_count(key, single(key, inputs));
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    } else if (section == "output") {
      if (item.name == "directory") {
        config.output_directory = single(key, inputs);
      } else if (item.name == "seed") {
        config.seed = to_count(key, single(key, inputs));
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    } else {
      throw InvalidArgument("config: key '" + item.name + "' outside of [problem], [mpc], [mesh], [output]");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  return parse_experiment_config(in);
}

MpcConfig SweepCase::to_config(const ExperimentConfig& experiment) const {
  MpcConfig c;
  c.variant = variant.variant;
  c.equidistant_windows = variant.equidistant_windows;
  c.m = m;
  c.N = N;
  if (variant.variant == MpcVariant::online && horizon_length) c.horizon_length = *horizon_length;
  c.doerfler_theta = experiment.theta;
  c.warm_start = experiment.warm_start;
  c.coarse_mesh = SpatialMesh(experiment.coarse_cells);
  c.fine_mesh = SpatialMesh(experiment.fine_cells);
  return c;
}

std::string SweepCase::directory_name() const {
  std::ostringstream name;
  name.imbue(std::locale::classic());
  name << variant.label() << "_N" << N;
  if (variant.variant == MpcVariant::online) {
    name << "_T" << std::setprecision(6) << horizon_length.value_or(0.0);
  } else {
    name << "_m" << m;
  }
  return name.str();
}

std::vector<SweepCase> expand_sweep(const ExperimentConfig& config) {
  std::vector<SweepCase> cases;
  for (const auto& variant : config.variants) {
    for (std::size_t N : config.N_values) {
      if (variant.variant == MpcVariant::online) {
        for (double span : config.horizon_lengths) cases.push_back({variant, 0, N, span});
      } else {
        for (std::size_t m : config.m_values) cases.push_back({variant, m, N, std::nullopt});
      }
    }
  }
  std::stable_sort(cases.begin(), cases.end(), [](const SweepCase& a, const SweepCase& b) {
    const auto la = a.variant.label(), lb = b.variant.label();
    if (la != lb) return la < lb;
    if (a.N != b.N) return a.N < b.N;
    if (a.m != b.m) return a.m < b.m;
    return a.horizon_length.value_or(0.0) < b.horizon_length.value_or(0.0);
  });
  return cases;
}

std::optional<double> compute_error(const MpcRun& run, const ProblemSpec& problem) {
  if (!problem.exact_y) return std::nullopt;
  const auto exact = SpaceTimeField::sample(run.closed_loop_y.grid(), run.closed_loop_y.mesh(), *problem.exact_y);
  return l2_norm_spacetime(run.closed_loop_y - exact);
}

SweepRow summarize(const SweepCase& sweep_case, const MpcRun& run, const ProblemSpec& problem) {
  SweepRow row;
  row.sweep_case = sweep_case;
  if (sweep_case.variant.variant == MpcVariant::uniform && sweep_case.m > 0) {
    row.sweep_case.horizon_length =
        static_cast<double>(sweep_case.N - 1) * problem.t_end / static_cast<double>(sweep_case.m);
  }
  if (sweep_case.variant.variant == MpcVariant::online) row.sweep_case.m = run.iterations();
  row.iterations = run.iterations();
  row.l2_error_y = compute_error(run, problem);
  row.tracking_cost = run.tracking_cost;
  row.control_cost = run.control_cost;
  row.total_wall_time = run.total_wall_time;
  return row;
}

void write_summary_header(std::ostream& out) {
  out << "variant,m,N,T_bar,l2_error_y,tracking_cost,control_cost,total_wall_time_s,status\n";
}

void write_summary_row(std::ostream& out, const SweepRow& row) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  const auto& c = row.sweep_case;
  out << c.variant.label() << ',' << c.m << ',' << c.N << ',';
  if (c.horizon_length) write_number(out, *c.horizon_length);
  out << ',';
  const bool ok = row.status == "ok";
  if (ok) {
    if (row.l2_error_y) {
      write_number(out, *row.l2_error_y);
    } else {
      out << "no reference";
    }
    out << ',';
    write_number(out, row.tracking_cost);
    out << ',';
    write_number(out, row.control_cost);
    out << ',';
    write_seconds(out, row.total_wall_time);
    out << ",ok\n";
  } else {
    std::string message = row.status;
    std::replace(message.begin(), message.end(), '"', '\'');
    out << ",,,,\"" << message << "\"\n";
  }
  out.flags(flags);
  out.precision(precision);
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, std::vector<SweepRow>* rows_out) {
  namespace fs = std::filesystem;
  config.validate();
  const ProblemSpec problem = make_problem(config.problem);
  fs::create_directories(config.output_directory);

  std::vector<fs::path> written;
  std::vector<SweepRow> rows;
  auto open = [&](const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    written.push_back(path);
    return out;
  };

  for (const auto& sweep_case : expand_sweep(config)) {
    const fs::path dir = config.output_directory / sweep_case.directory_name();
    SweepRow row;
    row.sweep_case = sweep_case;
    try {
      const MpcRun run = run_mpc(problem, sweep_case.to_config(config));
      row = summarize(sweep_case, run, problem);
      fs::create_directories(dir);
      {
        auto out = open(dir / "summary.csv");
        write_summary_header(out);
        write_summary_row(out, row);
      }
      {
        auto out = open(dir / "iterations.csv");
        write_iterations_csv(out, run);
      }
      {
        auto out = open(dir / "trajectory.csv");
        write_trajectory_csv(out, run);
      }
      {
        auto out = open(dir / "grid.txt");
        write_time_grid(out, run.closed_loop_y.grid());
      }
      if (run.master_grid) {
        auto out = open(dir / "master_grid.txt");
        write_time_grid(out, *run.master_grid);
      }
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(row);
  }

  {
    auto out = open(config.output_directory / "comparison.csv");
    write_summary_header(out);
    for (const auto& row : rows) write_summary_row(out, row);
  }
  if (rows_out) *rows_out = std::move(rows);
  return written;
}

}  // namespace tampc
