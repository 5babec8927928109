/*
 * Copyright 2026 The swarm-pddp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "swarm/artifacts.hpp"
#include "swarm/consensus.hpp"
#include "swarm/penalty.hpp"
#include "swarm/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInvalid = 3;

swarm::ScenarioConfig resolve_scenario(int scenario_id, const std::string& config_path) {
  if (!config_path.empty()) return swarm::scenarios::load(config_path);
  if (scenario_id >= 1) return swarm::scenarios::builtin(scenario_id);
  throw swarm::ConfigError("provide --scenario 1..4 or --config <file>");
}

void print_validation(const swarm::ValidationReport& report) {
  std::cout << "validation:\n"
            << "  min pairwise distance  " << report.min_pairwise_distance << " m (pair "
            << report.min_pairwise_pair.first << "," << report.min_pairwise_pair.second
            << " at instant " << report.min_pairwise_instant << ") "
            << (report.collision_ok ? "ok" : "VIOLATION") << "\n"
            << "  min obstacle margin    " << report.min_obstacle_clearance << " m "
            << (report.obstacle_ok ? "ok" : "VIOLATION") << "\n"
            << "  max neighbor distance  " << report.max_neighbor_distance << " m "
            << (report.comm_ok ? "ok" : "VIOLATION") << "\n";
  if (!report.time_gaps.empty()) {
    std::cout << "  arrival gaps          ";
    for (double g : report.time_gaps) std::cout << " " << g;
    std::cout << " s " << (report.time_sequence_ok ? "ok" : "VIOLATION") << "\n";
  }
}

struct RunArtifacts {
  swarm::SwarmSolution solution;
  swarm::ValidationReport report;
};

RunArtifacts execute(const swarm::ScenarioConfig& scenario, const std::string& scheme_name,
                     int max_iter_override, std::ostream* bus_trace) {
  swarm::ScenarioConfig config = scenario;
  if (max_iter_override > 0) config.stop.max_iter = max_iter_override;

  swarm::Engine::Options options;
  options.bus_trace = bus_trace;
  swarm::Engine engine(config, options);
  auto scheme = swarm::make_scheme(scheme_name);

  RunArtifacts out;
  out.solution = engine.run(*scheme);
  out.report = swarm::scenarios::validate(out.solution.trajectories, config);
  out.report.converged = out.solution.converged;
  out.report.iterations = out.solution.iterations;
  return out;
}

int cmd_run(int scenario_id, const std::string& config_path, const std::string& scheme,
            uint64_t seed, int max_iter, const std::string& out_dir, bool trace, bool svg) {
  const swarm::ScenarioConfig scenario = resolve_scenario(scenario_id, config_path);

  fs::create_directories(out_dir);
  std::ofstream bus_log;
  if (trace) {
    bus_log.open(out_dir + "/bus_trace.log");
    if (!bus_log) throw swarm::ConfigError("cannot write bus trace");
  }

  RunArtifacts run = execute(scenario, scheme, max_iter, trace ? &bus_log : nullptr);

  swarm::artifacts::write_solution_json(out_dir + "/solution.json", run.solution, scenario, seed);
  swarm::artifacts::write_agent_csvs(out_dir, run.solution, scenario);
  swarm::artifacts::write_residual_csv(out_dir + "/residuals.csv", run.solution);
  if (svg) {
    swarm::artifacts::write_trajectory_svg(out_dir + "/trajectories.svg", run.solution, scenario);
    swarm::artifacts::write_time_convergence_svg(out_dir + "/time_convergence.svg", run.solution,
                                                 scenario);
  }

  std::cout << scenario.name << " scheme=" << scheme << " iterations=" << run.solution.iterations
            << " converged=" << (run.solution.converged ? "yes" : "no") << " wall="
            << std::fixed << std::setprecision(2) << run.solution.wall_seconds << "s\n";
  std::cout.unsetf(std::ios::fixed);
  std::cout << "final times [s]:";
  for (const auto& traj : run.solution.trajectories) std::cout << " " << traj.t_final;
  std::cout << "\n";
  print_validation(run.report);
  std::cout << "artifacts in " << out_dir << "\n";

  if (!run.solution.converged) return kExitNotConverged;
  if (!run.report.all_ok()) return kExitInvalid;
  return kExitOk;
}

int cmd_compare(const std::vector<int>& scenario_ids, const std::vector<std::string>& schemes,
                int repeats, int max_iter, const std::string& out_csv) {
  struct Cell {
    int iterations = 0;
    double wall = 0.0;
    bool converged = false;
    bool ok = false;
  };
  std::vector<std::vector<Cell>> table(scenario_ids.size(), std::vector<Cell>(schemes.size()));

  for (size_t si = 0; si < scenario_ids.size(); ++si) {
    const swarm::ScenarioConfig scenario = swarm::scenarios::builtin(scenario_ids[si]);
    for (size_t ci = 0; ci < schemes.size(); ++ci) {
      for (int rep = 0; rep < std::max(1, repeats); ++rep) {
        try {
          RunArtifacts run = execute(scenario, schemes[ci], max_iter, nullptr);
          table[si][ci] = {run.solution.iterations, run.solution.wall_seconds,
                           run.solution.converged, run.report.all_ok()};
        } catch (const std::exception& e) {
          std::cerr << "run failed (" << scenario.name << ", " << schemes[ci] << "): " << e.what()
                    << "\n";
          table[si][ci] = {};
        }
      }
    }
  }

  auto baseline_index = [&]() {
    for (size_t ci = 0; ci < schemes.size(); ++ci) {
      if (schemes[ci] == "fixed") return ci;
    }
    return size_t{0};
  }();

  std::cout << std::left << std::setw(12) << "scenario";
  for (const std::string& s : schemes) {
    std::cout << std::setw(10) << (s + " it") << std::setw(12) << "reduction" << std::setw(10)
              << "wall[s]";
  }
  std::cout << "\n";
  for (size_t si = 0; si < scenario_ids.size(); ++si) {
    std::cout << std::setw(12) << ("scenario-" + std::to_string(scenario_ids[si]));
    const double base = table[si][baseline_index].iterations;
    for (size_t ci = 0; ci < schemes.size(); ++ci) {
      const Cell& cell = table[si][ci];
      const double red = base > 0 ? 100.0 * (base - cell.iterations) / base : 0.0;
      std::ostringstream reds;
      reds << std::fixed << std::setprecision(2) << red << "%";
      std::ostringstream walls;
      walls << std::fixed << std::setprecision(2) << cell.wall;
      std::cout << std::setw(10) << (cell.converged ? std::to_string(cell.iterations)
                                                    : std::to_string(cell.iterations) + "*")
                << std::setw(12) << reds.str() << std::setw(10) << walls.str();
    }
    std::cout << "\n";
  }
  std::cout << "(*: hit the iteration cap)\n";

  if (!out_csv.empty()) {
    std::ofstream csv(out_csv);
    if (!csv) throw swarm::ConfigError("cannot write '" + out_csv + "'");
    csv << "scenario,scheme,iterations,converged,valid,reduction_vs_fixed_pct\n";
    for (size_t si = 0; si < scenario_ids.size(); ++si) {
      const double base = table[si][baseline_index].iterations;
      for (size_t ci = 0; ci < schemes.size(); ++ci) {
        const Cell& cell = table[si][ci];
        const double red = base > 0 ? 100.0 * (base - cell.iterations) / base : 0.0;
        char redbuf[32];
        std::snprintf(redbuf, sizeof(redbuf), "%.4f", red);
        csv << "scenario-" << scenario_ids[si] << "," << schemes[ci] << "," << cell.iterations
            << "," << (cell.converged ? 1 : 0) << "," << (cell.ok ? 1 : 0) << "," << redbuf
            << "\n";
      }
    }
    std::cout << "comparison CSV written to " << out_csv << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& solution_path, int scenario_id,
                 const std::string& config_path) {
  const swarm::ScenarioConfig scenario = resolve_scenario(scenario_id, config_path);
  const swarm::artifacts::LoadedSolution loaded = swarm::artifacts::read_solution_json(solution_path);
  swarm::ValidationReport report = swarm::scenarios::validate(loaded.trajectories, scenario);
  report.converged = loaded.converged;
  report.iterations = loaded.iterations;
  print_validation(report);
  return report.all_ok() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed spatial-temporal trajectory optimizer for fixed-speed vehicle swarms"};
  app.require_subcommand(1);

  const std::vector<std::string> scheme_names = {"fixed", "rb", "rb-inverted", "na", "ap"};

  int scenario_id = 0;
  std::string config_path;
  std::string scheme = "fixed";
  uint64_t seed = 0;
  int max_iter = 0;
  std::string out_dir = "out";
  bool trace = false;
  bool svg = true;

  CLI::App* run = app.add_subcommand("run", "Optimize one scenario and emit artifacts");
  run->add_option("--scenario", scenario_id, "Built-in scenario id (1..4)");
  run->add_option("--config", config_path, "Scenario config file");
  run->add_option("--scheme", scheme, "Penalty scheme")->check(CLI::IsMember(scheme_names));
  run->add_option("--seed", seed, "Recorded in the solution document");
  run->add_option("--max-iter", max_iter, "Override the scenario iteration cap");
  run->add_option("--out", out_dir, "Artifact directory");
  run->add_flag("--trace", trace, "Write the per-message bus log");
  run->add_flag("--svg,!--no-svg", svg, "Emit SVG plots (default on)");

  std::vector<int> cmp_scenarios{1, 2, 3, 4};
  std::vector<std::string> cmp_schemes{"fixed", "ap"};
  int repeats = 1;
  std::string cmp_csv;
  CLI::App* compare = app.add_subcommand("compare", "Run a scheme-comparison table");
  compare->add_option("--scenarios", cmp_scenarios, "Built-in scenario ids");
  compare->add_option("--schemes", cmp_schemes, "Schemes to compare")
      ->check(CLI::IsMember(scheme_names));
  compare->add_option("--repeats", repeats, "Repeat runs (determinism check)");
  compare->add_option("--max-iter", max_iter, "Override the scenario iteration cap");
  compare->add_option("--out", cmp_csv, "Comparison CSV path");

  std::string solution_path;
  CLI::App* validate = app.add_subcommand("validate", "Audit a solution document");
  validate->add_option("--solution", solution_path, "solution.json path")->required();
  validate->add_option("--scenario", scenario_id, "Built-in scenario id (1..4)");
  validate->add_option("--config", config_path, "Scenario config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(scenario_id, config_path, scheme, seed, max_iter, out_dir, trace, svg);
    }
    if (compare->parsed()) {
      if (cmp_schemes.size() < 2) throw swarm::ConfigError("compare needs at least two schemes");
      return cmd_compare(cmp_scenarios, cmp_schemes, repeats, max_iter, cmp_csv);
    }
    if (validate->parsed()) {
      return cmd_validate(solution_path, scenario_id, config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
