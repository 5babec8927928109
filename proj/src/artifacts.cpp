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

#include "swarm/artifacts.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace swarm::artifacts {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string solution_to_json(const SwarmSolution& solution, const ScenarioConfig& scenario,
                             uint64_t seed) {
  Json root;
  root["version"] = 1;
  root["scenario"] = scenario.name;
  root["scheme"] = solution.scheme;
  root["seed"] = seed;
  root["converged"] = solution.converged;
  root["iterations"] = solution.iterations;
  root["n_steps"] = scenario.dynamics.n_steps;
  root["agents"] = Json::array();
  for (size_t i = 0; i < solution.trajectories.size(); ++i) {
    const AgentTrajectory& traj = solution.trajectories[i];
    Json agent;
    agent["id"] = i;
    agent["t_final_s"] = traj.t_final;
    Json states = Json::array();
    for (const AgentState& s : traj.states) states.push_back({s.x(), s.y(), s[kStateHeading]});
    agent["states"] = std::move(states);
    agent["controls"] = traj.controls;
    root["agents"].push_back(std::move(agent));
  }
  return root.dump(1) + "\n";
}

void write_solution_json(const std::string& path, const SwarmSolution& solution,
                         const ScenarioConfig& scenario, uint64_t seed) {
  open_out(path) << solution_to_json(solution, scenario, seed);
}

LoadedSolution read_solution_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open solution '" + path + "'");
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("solution: invalid JSON: ") + e.what());
  }
  if (!root.contains("version") || root["version"].get<int>() != 1) {
    throw ConfigError("solution: unsupported version");
  }
  LoadedSolution loaded;
  loaded.converged = root.value("converged", false);
  loaded.iterations = root.value("iterations", 0);
  loaded.scheme = root.value("scheme", "");
  loaded.scenario_name = root.value("scenario", "");
  for (const Json& agent : root.at("agents")) {
    AgentTrajectory traj;
    traj.t_final = agent.at("t_final_s").get<double>();
    for (const Json& s : agent.at("states")) {
      traj.states.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()});
    }
    traj.controls = agent.at("controls").get<std::vector<double>>();
    loaded.trajectories.push_back(std::move(traj));
  }
  return loaded;
}

void write_agent_csvs(const std::string& dir, const SwarmSolution& solution,
                      const ScenarioConfig& scenario) {
  for (size_t i = 0; i < solution.trajectories.size(); ++i) {
    const AgentTrajectory& traj = solution.trajectories[i];
    std::ofstream out = open_out(dir + "/agent_" + std::to_string(i) + ".csv");
    out << "k,t_s,x_m,y_m,heading_rad,omega_radps\n";
    const double dt = traj.t_final / scenario.dynamics.n_steps;
    for (size_t k = 0; k < traj.states.size(); ++k) {
      const AgentState& s = traj.states[k];
      const std::string omega = k < traj.controls.size() ? num(traj.controls[k]) : "";
      out << k << "," << num(k * dt) << "," << num(s.x()) << "," << num(s.y()) << ","
          << num(s[kStateHeading]) << "," << omega << "\n";
    }
  }
}

void write_residual_csv(const std::string& path, const SwarmSolution& solution) {
  std::ofstream out = open_out(path);
  out << "iteration";
  for (const char* f : kFamilyNames) {
    out << ",r_primal_" << f << ",r_dual_" << f << ",dual_stack_" << f;
  }
  out << ",t_finals,penalties_tau,penalties_rho,penalties_mu,penalties_sigma,penalties_gamma"
      << ",stopped,na_restart\n";
  auto join = [](const std::vector<double>& vals) {
    std::string s;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i > 0) s += ';';
      s += num(vals[i]);
    }
    return s;
  };
  for (const IterationTraceRow& row : solution.trace) {
    out << row.iteration;
    for (int f = 0; f < kFamilyCount; ++f) {
      out << "," << num(row.report.fam[f].primal) << "," << num(row.report.fam[f].dual) << ","
          << num(row.report.fam[f].dual_stack);
    }
    out << "," << join(row.t_finals);
    for (int f = 0; f < kFamilyCount; ++f) {
      std::vector<double> pens;
      pens.reserve(row.penalties.size());
      for (const auto& p : row.penalties) pens.push_back(p[f]);
      out << "," << join(pens);
    }
    out << "," << (row.stopped ? 1 : 0) << "," << (row.na_restart ? 1 : 0) << "\n";
  }
}

namespace {

struct Frame {
  double min_x, min_y, max_x, max_y;
  double scale, width, height;
  double px(double x) const { return (x - min_x) * scale + 20.0; }
  double py(double y) const { return height - ((y - min_y) * scale + 20.0); }
};

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_trajectory_svg(const std::string& path, const SwarmSolution& solution,
                          const ScenarioConfig& scenario) {
  Frame fr{1e30, 1e30, -1e30, -1e30, 1.0, 0.0, 0.0};
  for (const AgentTrajectory& traj : solution.trajectories) {
    for (const AgentState& s : traj.states) {
      fr.min_x = std::min(fr.min_x, s.x());
      fr.max_x = std::max(fr.max_x, s.x());
      fr.min_y = std::min(fr.min_y, s.y());
      fr.max_y = std::max(fr.max_y, s.y());
    }
  }
  for (const Obstacle& o : scenario.obstacles) {
    const double reach = o.radius + scenario.d_obstacle_safe;
    fr.min_x = std::min(fr.min_x, o.center.x() - reach);
    fr.max_x = std::max(fr.max_x, o.center.x() + reach);
    fr.min_y = std::min(fr.min_y, o.center.y() - reach);
    fr.max_y = std::max(fr.max_y, o.center.y() + reach);
  }
  const double span = std::max(fr.max_x - fr.min_x, fr.max_y - fr.min_y);
  fr.scale = span > 0.0 ? 760.0 / span : 1.0;
  fr.width = (fr.max_x - fr.min_x) * fr.scale + 40.0;
  fr.height = (fr.max_y - fr.min_y) * fr.scale + 40.0;

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(fr.width) << "\" height=\""
      << f2(fr.height) << "\" viewBox=\"0 0 " << f2(fr.width) << " " << f2(fr.height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const Obstacle& o : scenario.obstacles) {
    out << "<circle cx=\"" << f2(fr.px(o.center.x())) << "\" cy=\"" << f2(fr.py(o.center.y()))
        << "\" r=\"" << f2(o.radius * fr.scale) << "\" fill=\"#cccccc\" stroke=\"#555555\"/>\n";
    out << "<circle cx=\"" << f2(fr.px(o.center.x())) << "\" cy=\"" << f2(fr.py(o.center.y()))
        << "\" r=\"" << f2((o.radius + scenario.d_obstacle_safe) * fr.scale)
        << "\" fill=\"none\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (size_t i = 0; i < solution.trajectories.size(); ++i) {
    const AgentTrajectory& traj = solution.trajectories[i];
    const char* color = kPalette[i % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const AgentState& s : traj.states) {
      out << f2(fr.px(s.x())) << "," << f2(fr.py(s.y())) << " ";
    }
    out << "\"/>\n";
    const AgentState& last = traj.states.back();
    out << "<circle cx=\"" << f2(fr.px(last.x())) << "\" cy=\"" << f2(fr.py(last.y()))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    // Communication reach at arrival.
    out << "<circle cx=\"" << f2(fr.px(last.x())) << "\" cy=\"" << f2(fr.py(last.y()))
        << "\" r=\"" << f2(scenario.d_comm * fr.scale) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-opacity=\"0.25\" stroke-dasharray=\"2 6\"/>\n";
  }
  out << "</svg>\n";
}

void write_time_convergence_svg(const std::string& path, const SwarmSolution& solution,
                                const ScenarioConfig& scenario) {
  (void)scenario;
  const double width = 800.0, height = 400.0, margin = 45.0;
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
      << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (!solution.trace.empty()) {
    double tmin = 1e30, tmax = -1e30;
    for (const IterationTraceRow& row : solution.trace) {
      for (double t : row.t_finals) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
    }
    if (tmax - tmin < 1e-6) {
      tmin -= 0.05;
      tmax += 0.05;
    }
    const double iters = static_cast<double>(solution.trace.size());
    auto px = [&](double it) { return margin + (it - 1.0) / std::max(1.0, iters - 1.0) * (width - 2 * margin); };
    auto py = [&](double t) { return height - margin - (t - tmin) / (tmax - tmin) * (height - 2 * margin); };

    out << "<line x1=\"" << f2(margin) << "\" y1=\"" << f2(height - margin) << "\" x2=\""
        << f2(width - margin) << "\" y2=\"" << f2(height - margin)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << f2(margin) << "\" y1=\"" << f2(margin) << "\" x2=\"" << f2(margin)
        << "\" y2=\"" << f2(height - margin) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << f2(width / 2) << "\" y=\"" << f2(height - 8)
        << "\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n";
    out << "<text x=\"12\" y=\"" << f2(height / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
        << f2(height / 2) << ")\">final time [s]</text>\n";
    out << "<text x=\"" << f2(margin) << "\" y=\"" << f2(height - margin + 14)
        << "\" font-size=\"10\">1</text>\n";
    out << "<text x=\"" << f2(width - margin) << "\" y=\"" << f2(height - margin + 14)
        << "\" font-size=\"10\" text-anchor=\"end\">" << solution.trace.size() << "</text>\n";
    out << "<text x=\"" << f2(margin - 4) << "\" y=\"" << f2(py(tmin))
        << "\" font-size=\"10\" text-anchor=\"end\">" << f2(tmin) << "</text>\n";
    out << "<text x=\"" << f2(margin - 4) << "\" y=\"" << f2(py(tmax))
        << "\" font-size=\"10\" text-anchor=\"end\">" << f2(tmax) << "</text>\n";

    const size_t m = solution.trace.front().t_finals.size();
    for (size_t i = 0; i < m; ++i) {
      out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 8]
          << "\" stroke-width=\"1.2\" points=\"";
      for (const IterationTraceRow& row : solution.trace) {
        out << f2(px(row.iteration)) << "," << f2(py(row.t_finals[i])) << " ";
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace swarm::artifacts
