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

#include "swarm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace swarm {

namespace {
constexpr double kPi = std::numbers::pi;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }
}  // namespace

CostWeights ScenarioConfig::weights_for(int agent) const {
  CostWeights w;
  w.w_terminal = w_terminal;
  w.r_control = r_control;
  w.w_state = w_state;
  w.target = agents[agent].target;
  return w;
}

Topology ScenarioConfig::topology() const {
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(agents.size());
  for (const AgentSpec& a : agents) positions.emplace_back(a.initial.x(), a.initial.y());
  return build_topology(positions, topology_size);
}

namespace scenarios {

ScenarioConfig builtin(int id) {
  ScenarioConfig c;
  c.name = "scenario-" + std::to_string(id);
  switch (id) {
    case 1: {
      c.agents = {
          {{15.0, 110.0, 0.0}, {285.0, 110.0, 0.0}},
          {{15.0, 140.0, 0.0}, {285.0, 140.0, 0.0}},
          {{285.0, 110.0, kPi}, {15.0, 110.0, kPi}},
          {{285.0, 140.0, kPi}, {15.0, 140.0, kPi}},
      };
      c.t_guess = 9.3;
      c.obstacles = {{{150.0, 125.0}, 20.0}};
      c.d_comm = 300.0;
      c.topology_size = 0;  // all four are mutual neighbors
      break;
    }
    case 2: {
      c.agents = {
          {{328.75, 26.5, deg2rad(60.0)}, {302.6, 275.14, deg2rad(120.0)}},
          {{484.0, 95.6, deg2rad(120.0)}, {324.45, 281.42, deg2rad(180.0)}},
          {{587.0, 242.8, deg2rad(120.0)}, {342.45, 294.8, deg2rad(210.0)}},
          {{551.2, 411.85, deg2rad(180.0)}, {322.84, 310.17, deg2rad(240.0)}},
          {{437.5, 538.16, deg2rad(240.0)}, {312.5, 321.65, deg2rad(270.0)}},
      };
      c.t_guess = 9.0;
      c.obstacles = {{{400.0, 200.0}, 40.0}, {{450.0, 380.0}, 40.0}};
      c.d_comm = 380.0;
      c.topology_size = 3;
      c.time_sequence = {TimeSequenceKind::kIntervals, 0.1, 0.01};
      c.stop.eps_abs = 5e-4;
      break;
    }
    case 3: {
      // 16 vehicles on a ring, each crossing to the point mirrored through
      // the ring center; the 270 m figure is the crossing length (ring
      // diameter). Headings point through the center both ways.
      const int m = 16;
      const double radius = 135.0;
      for (int i = 0; i < m; ++i) {
        const double phi = 2.0 * kPi * i / m;
        const Eigen::Vector2d p(radius * std::cos(phi), radius * std::sin(phi));
        const double heading = phi + kPi;  // toward the center, unwrapped
        c.agents.push_back({{p.x(), p.y(), heading}, {-p.x(), -p.y(), heading}});
      }
      c.t_guess = 9.2;
      c.obstacles = {{{0.0, 0.0}, 20.0}};
      c.d_comm = 120.0;
      c.topology_size = 5;
      c.time_sequence = {TimeSequenceKind::kSimultaneous, 0.0, 0.0};
      break;
    }
    case 4: {
      for (int i = 1; i <= 20; ++i) {
        const double offset = 10.0 * ((i % 2 == 0) ? 1.0 : -1.0);
        const double y = 100.0 + (i - 1) * 30.0;
        c.agents.push_back({{20.0 + offset, y, 0.0}, {290.0 + offset, y, 0.0}});
      }
      c.t_guess = 9.2;
      c.obstacles = {{{200.0, 200.0}, 15.0}, {{150.0, 120.0}, 20.0}, {{180.0, 300.0}, 20.0},
                     {{150.0, 390.0}, 20.0}, {{210.0, 500.0}, 20.0}, {{150.0, 580.0}, 15.0},
                     {{180.0, 680.0}, 20.0}};
      c.d_comm = 170.0;
      c.topology_size = 5;
      break;
    }
    default:
      throw ConfigError("builtin scenario id must be 1..4");
  }
  return c;
}

namespace {

using Json = nlohmann::ordered_json;

void require_keys(const Json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
  }
}

const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("config: missing field '" + key + "' in " + where);
  }
  return *it;
}

AgentState parse_state(const Json& obj, const std::string& where) {
  require_keys(obj, {"x_m", "y_m", "heading_deg"}, where);
  return {field(obj, "x_m", where).get<double>(), field(obj, "y_m", where).get<double>(),
          deg2rad(field(obj, "heading_deg", where).get<double>())};
}

Json dump_state(const AgentState& s) {
  return Json{{"x_m", s.x()}, {"y_m", s.y()}, {"heading_deg", rad2deg(s[kStateHeading])}};
}

Eigen::Vector3d parse_vec3(const Json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 3) {
    throw ConfigError("config: '" + where + "' must be an array of 3 numbers");
  }
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

ScenarioConfig from_json_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  require_keys(root,
               {"version", "name", "dynamics", "agents", "t_guess_s", "t_bounds_s", "obstacles",
                "d_obstacle_safe_m", "d_collision_m", "d_comm_m", "topology_size", "time_sequence",
                "weights", "stop", "penalties"},
               "root");
  if (field(root, "version", "root").get<int>() != 1) {
    throw ConfigError("config: unsupported version (expected 1)");
  }

  ScenarioConfig c;
  c.name = field(root, "name", "root").get<std::string>();

  const Json& dyn = field(root, "dynamics", "root");
  require_keys(dyn, {"speed_mps", "omega_max_radps", "n_steps", "integrator"}, "dynamics");
  c.dynamics.speed = field(dyn, "speed_mps", "dynamics").get<double>();
  c.dynamics.omega_max = field(dyn, "omega_max_radps", "dynamics").get<double>();
  c.dynamics.n_steps = field(dyn, "n_steps", "dynamics").get<int>();
  const std::string integ = field(dyn, "integrator", "dynamics").get<std::string>();
  if (integ == "euler") {
    c.dynamics.integrator = Integrator::kEuler;
  } else if (integ == "rk4") {
    c.dynamics.integrator = Integrator::kRk4;
  } else {
    throw ConfigError("config: integrator must be 'euler' or 'rk4'");
  }
  if (c.dynamics.speed <= 0.0 || c.dynamics.omega_max <= 0.0 || c.dynamics.n_steps < 2) {
    throw ConfigError("config: dynamics out of range (speed > 0, omega_max > 0, n_steps >= 2)");
  }

  for (const Json& a : field(root, "agents", "root")) {
    require_keys(a, {"initial", "target"}, "agents[]");
    c.agents.push_back({parse_state(field(a, "initial", "agents[]"), "agents[].initial"),
                        parse_state(field(a, "target", "agents[]"), "agents[].target")});
  }
  if (c.agents.empty()) throw ConfigError("config: at least one agent required");

  c.t_guess = field(root, "t_guess_s", "root").get<double>();
  const Json& tb = field(root, "t_bounds_s", "root");
  if (!tb.is_array() || tb.size() != 2) throw ConfigError("config: 't_bounds_s' must be [min, max]");
  c.t_min = tb[0].get<double>();
  c.t_max = tb[1].get<double>();
  if (!(c.t_min < c.t_max)) throw ConfigError("config: t_bounds_s must be ordered");

  for (const Json& o : field(root, "obstacles", "root")) {
    require_keys(o, {"center_m", "radius_m"}, "obstacles[]");
    const Json& ctr = field(o, "center_m", "obstacles[]");
    if (!ctr.is_array() || ctr.size() != 2) {
      throw ConfigError("config: obstacle 'center_m' must be [x, y]");
    }
    Obstacle ob{{ctr[0].get<double>(), ctr[1].get<double>()},
                field(o, "radius_m", "obstacles[]").get<double>()};
    if (ob.radius <= 0.0) throw ConfigError("config: obstacle 'radius_m' must be positive");
    c.obstacles.push_back(ob);
  }

  c.d_obstacle_safe = field(root, "d_obstacle_safe_m", "root").get<double>();
  c.d_collision = field(root, "d_collision_m", "root").get<double>();
  c.d_comm = field(root, "d_comm_m", "root").get<double>();
  if (!(c.d_collision < c.d_comm)) {
    throw ConfigError("config: require d_collision_m < d_comm_m");
  }
  c.topology_size = field(root, "topology_size", "root").get<int>();

  const Json& seq = field(root, "time_sequence", "root");
  require_keys(seq, {"kind", "interval_s", "relax_s"}, "time_sequence");
  const std::string kind = field(seq, "kind", "time_sequence").get<std::string>();
  if (kind == "none") {
    c.time_sequence.kind = TimeSequenceKind::kNone;
  } else if (kind == "simultaneous") {
    c.time_sequence.kind = TimeSequenceKind::kSimultaneous;
  } else if (kind == "intervals") {
    c.time_sequence.kind = TimeSequenceKind::kIntervals;
    c.time_sequence.interval = field(seq, "interval_s", "time_sequence").get<double>();
  } else {
    throw ConfigError("config: time_sequence.kind must be none|simultaneous|intervals");
  }
  if (seq.contains("relax_s")) c.time_sequence.relax = seq["relax_s"].get<double>();
  if (c.time_sequence.relax < 0.0) throw ConfigError("config: relax_s must be >= 0");

  const Json& w = field(root, "weights", "root");
  require_keys(w, {"terminal", "control", "state"}, "weights");
  c.w_terminal = parse_vec3(field(w, "terminal", "weights"), "weights.terminal");
  c.r_control = field(w, "control", "weights").get<double>();
  c.w_state = parse_vec3(field(w, "state", "weights"), "weights.state");
  if (c.r_control <= 0.0) throw ConfigError("config: weights.control must be positive");

  const Json& st = field(root, "stop", "root");
  require_keys(st, {"eps_abs", "eps_rel", "max_iter"}, "stop");
  c.stop.eps_abs = field(st, "eps_abs", "stop").get<double>();
  c.stop.eps_rel = field(st, "eps_rel", "stop").get<double>();
  c.stop.max_iter = field(st, "max_iter", "stop").get<int>();

  const Json& pen = field(root, "penalties", "root");
  require_keys(pen, {"tau", "rho", "mu", "sigma", "gamma"}, "penalties");
  c.penalties.tau = field(pen, "tau", "penalties").get<double>();
  c.penalties.rho = field(pen, "rho", "penalties").get<double>();
  c.penalties.mu = field(pen, "mu", "penalties").get<double>();
  c.penalties.sigma = field(pen, "sigma", "penalties").get<double>();
  c.penalties.gamma = field(pen, "gamma", "penalties").get<double>();
  for (double p : {c.penalties.tau, c.penalties.rho, c.penalties.mu, c.penalties.sigma,
                   c.penalties.gamma}) {
    if (!(p > 0.0)) throw ConfigError("config: penalties must be positive");
  }
  return c;
}

ScenarioConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string to_json_text(const ScenarioConfig& c) {
  Json root;
  root["version"] = 1;
  root["name"] = c.name;
  root["dynamics"] = {{"speed_mps", c.dynamics.speed},
                      {"omega_max_radps", c.dynamics.omega_max},
                      {"n_steps", c.dynamics.n_steps},
                      {"integrator", c.dynamics.integrator == Integrator::kEuler ? "euler" : "rk4"}};
  root["agents"] = Json::array();
  for (const AgentSpec& a : c.agents) {
    root["agents"].push_back({{"initial", dump_state(a.initial)}, {"target", dump_state(a.target)}});
  }
  root["t_guess_s"] = c.t_guess;
  root["t_bounds_s"] = {c.t_min, c.t_max};
  root["obstacles"] = Json::array();
  for (const Obstacle& o : c.obstacles) {
    root["obstacles"].push_back({{"center_m", {o.center.x(), o.center.y()}}, {"radius_m", o.radius}});
  }
  root["d_obstacle_safe_m"] = c.d_obstacle_safe;
  root["d_collision_m"] = c.d_collision;
  root["d_comm_m"] = c.d_comm;
  root["topology_size"] = c.topology_size;
  switch (c.time_sequence.kind) {
    case TimeSequenceKind::kNone:
      root["time_sequence"] = {{"kind", "none"}};
      break;
    case TimeSequenceKind::kSimultaneous:
      root["time_sequence"] = {{"kind", "simultaneous"}, {"relax_s", c.time_sequence.relax}};
      break;
    case TimeSequenceKind::kIntervals:
      root["time_sequence"] = {{"kind", "intervals"},
                               {"interval_s", c.time_sequence.interval},
                               {"relax_s", c.time_sequence.relax}};
      break;
  }
  root["weights"] = {{"terminal", {c.w_terminal[0], c.w_terminal[1], c.w_terminal[2]}},
                     {"control", c.r_control},
                     {"state", {c.w_state[0], c.w_state[1], c.w_state[2]}}};
  root["stop"] = {{"eps_abs", c.stop.eps_abs}, {"eps_rel", c.stop.eps_rel},
                  {"max_iter", c.stop.max_iter}};
  root["penalties"] = {{"tau", c.penalties.tau},
                       {"rho", c.penalties.rho},
                       {"mu", c.penalties.mu},
                       {"sigma", c.penalties.sigma},
                       {"gamma", c.penalties.gamma}};
  return root.dump(2) + "\n";
}

std::optional<qp::TimeSequenceSpec> time_spec_for(const ScenarioConfig& config,
                                                  const Topology& topo, int agent) {
  if (config.time_sequence.kind == TimeSequenceKind::kNone) return std::nullopt;

  const auto& set = topo.neighbor_sets[agent];
  std::vector<int> paired_blocks;
  for (size_t b = 1; b < set.size(); ++b) {
    if (config.time_sequence.kind == TimeSequenceKind::kSimultaneous ||
        std::abs(set[b] - agent) == 1) {
      paired_blocks.push_back(static_cast<int>(b));
    }
  }
  if (paired_blocks.empty()) return std::nullopt;

  qp::TimeSequenceSpec spec;
  spec.matrix_a = Eigen::MatrixXd::Zero(paired_blocks.size(), set.size());
  spec.t_delta.resize(paired_blocks.size());
  spec.relax.resize(paired_blocks.size());
  for (size_t r = 0; r < paired_blocks.size(); ++r) {
    const int b = paired_blocks[r];
    spec.matrix_a(r, 0) = 1.0;
    spec.matrix_a(r, b) = -1.0;
    spec.t_delta[r] = config.time_sequence.interval * (agent - set[b]);
    spec.relax[r] = config.time_sequence.relax;
  }
  return spec;
}

ValidationReport validate(const std::vector<AgentTrajectory>& trajectories,
                          const ScenarioConfig& config) {
  const int m = static_cast<int>(trajectories.size());
  const int n = config.dynamics.n_steps;
  const Topology topo = config.topology();

  ValidationReport report;
  report.min_pairwise_distance = std::numeric_limits<double>::infinity();
  report.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  report.max_neighbor_distance = 0.0;

  auto pos = [&](int i, int k) -> Eigen::Vector2d {
    return trajectories[i].states[k].head<2>();
  };

  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double d = (pos(i, k) - pos(j, k)).norm();
        if (d < report.min_pairwise_distance) {
          report.min_pairwise_distance = d;
          report.min_pairwise_instant = k;
          report.min_pairwise_pair = {i, j};
        }
      }
      for (const Obstacle& o : config.obstacles) {
        const double margin = (pos(i, k) - o.center).norm() - o.radius - config.d_obstacle_safe;
        report.min_obstacle_clearance = std::min(report.min_obstacle_clearance, margin);
      }
    }
    for (int i = 0; i < m; ++i) {
      for (size_t b = 1; b < topo.neighbor_sets[i].size(); ++b) {
        const double d = (pos(i, k) - pos(topo.neighbor_sets[i][b], k)).norm();
        report.max_neighbor_distance = std::max(report.max_neighbor_distance, d);
      }
    }
  }
  if (config.obstacles.empty()) report.min_obstacle_clearance = 0.0;
  if (m < 2) report.min_pairwise_distance = std::numeric_limits<double>::infinity();

  report.terminal_position_errors.resize(m);
  for (int i = 0; i < m; ++i) {
    report.terminal_position_errors[i] =
        (pos(i, n) - config.agents[i].target.head<2>()).norm();
  }

  // Arrival gaps per sequence row (consecutive chain for interval missions,
  // all neighbor pairs for simultaneous ones).
  const double gap_tol = config.time_sequence.relax + 1e-3;
  if (config.time_sequence.kind == TimeSequenceKind::kIntervals) {
    for (int i = 0; i + 1 < m; ++i) {
      const double gap = trajectories[i + 1].t_final - trajectories[i].t_final;
      report.time_gaps.push_back(gap);
      if (std::abs(gap - config.time_sequence.interval) > gap_tol) {
        report.time_sequence_ok = false;
      }
    }
  } else if (config.time_sequence.kind == TimeSequenceKind::kSimultaneous) {
    for (int i = 0; i < m; ++i) {
      for (size_t b = 1; b < topo.neighbor_sets[i].size(); ++b) {
        const int j = topo.neighbor_sets[i][b];
        if (j < i) continue;
        const double gap = trajectories[j].t_final - trajectories[i].t_final;
        report.time_gaps.push_back(gap);
        if (std::abs(gap) > gap_tol) report.time_sequence_ok = false;
      }
    }
  }

  // Post-hoc safety uses a 0.1 m slack against the hard distances.
  report.collision_ok = m < 2 || report.min_pairwise_distance >= config.d_collision - 0.1;
  report.obstacle_ok = report.min_obstacle_clearance >= -0.1;
  report.comm_ok = report.max_neighbor_distance <= config.d_comm + 0.1;
  return report;
}

}  // namespace scenarios
}  // namespace swarm
