#include "hjra/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "hjra/hjvf.hpp"
#include "hjra/oracle.hpp"

namespace hjra {

namespace fs = std::filesystem;
using nlohmann::json;

SolveKind parse_solve_kind(const std::string& name) {
  if (name == "vertical-tracking") return SolveKind::VerticalTracking;
  if (name == "horizontal-tracking") return SolveKind::HorizontalTracking;
  if (name == "vertical-game") return SolveKind::VerticalGame;
  if (name == "horizontal-game") return SolveKind::HorizontalGame;
  if (name == "attacker-reach") return SolveKind::AttackerReach;
  throw std::invalid_argument("unknown solve kind: " + name);
}

const char* solve_kind_name(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalTracking: return "vertical-tracking";
    case SolveKind::HorizontalTracking: return "horizontal-tracking";
    case SolveKind::VerticalGame: return "vertical-game";
    case SolveKind::HorizontalGame: return "horizontal-game";
    case SolveKind::AttackerReach: return "attacker-reach";
  }
  return "?";
}

namespace {

const char* domain_key(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalTracking: return "vertical_tracking";
    case SolveKind::HorizontalTracking: return "horizontal_tracking";
    case SolveKind::VerticalGame: return "vertical_game";
    case SolveKind::HorizontalGame: return "horizontal_game";
    case SolveKind::AttackerReach: return "attacker_reach";
  }
  return "?";
}

DomainBox default_domain(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalTracking:
      return {{240, 100}, {-10, -4}, {10, 4}};
    case SolveKind::HorizontalTracking:
      return {{41, 41, 31, 31}, {-3, -3, -6, -6}, {3, 3, 6, 6}};
    case SolveKind::VerticalGame:
      return {{121, 61, 121}, {-10, -4, -10}, {10, 4, 10}};
    case SolveKind::HorizontalGame:
      return {{45, 25, 7, 7, 45, 25},
              {0, 0, -6, -6, 0, 0},
              {45, 25, 6, 6, 45, 25}};
    case SolveKind::AttackerReach:
      return {{226, 126}, {0, 0}, {45, 25}};
  }
  return {};
}

std::vector<int> paper_scale_counts(SolveKind kind) {
  switch (kind) {
    case SolveKind::HorizontalTracking: return {60, 60, 75, 75};
    case SolveKind::HorizontalGame: return {85, 45, 8, 7, 85, 45};
    default: return {};
  }
}

const char* artifact_file(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalTracking: return "v_z.hjvf";
    case SolveKind::HorizontalTracking: return "v_h.hjvf";
    case SolveKind::VerticalGame: return "phi_z.hjvf";
    case SolveKind::HorizontalGame: return "phi_h.hjvf";
    case SolveKind::AttackerReach: return "attacker_reach.hjvf";
  }
  return "?";
}

const char* time_file(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalGame: return "t_capture.hjvf";
    case SolveKind::AttackerReach: return "t_goal.hjvf";
    default: return nullptr;
  }
}

}  // namespace

GridSpec resolve_grid(const Scenario& scenario, SolveKind kind,
                      const PipelineManifest& manifest) {
  DomainBox box = default_domain(kind);
  const auto it = scenario.domains.find(domain_key(kind));
  if (it != scenario.domains.end()) box = it->second;
  if (manifest.paper_scale) {
    const auto counts = paper_scale_counts(kind);
    if (!counts.empty()) box.counts = counts;
  }
  const auto ov = manifest.grid_counts.find(domain_key(kind));
  if (ov != manifest.grid_counts.end()) {
    if (ov->second.size() != box.counts.size())
      throw std::invalid_argument("grid override arity mismatch for " +
                                  std::string(domain_key(kind)));
    box.counts = ov->second;
  }
  return box.to_grid();
}

double default_horizon(SolveKind kind) {
  switch (kind) {
    case SolveKind::VerticalTracking: return 20.0;
    case SolveKind::HorizontalTracking: return 2.5;
    case SolveKind::VerticalGame: return 16.0;
    case SolveKind::HorizontalGame: return 22.0;
    case SolveKind::AttackerReach: return 15.0;
  }
  return 10.0;
}

namespace {

struct SolveOutput {
  ValueSolution sol;
  std::string dynamics;
};

SolveOutput run_one_solve(SolveKind kind, const Scenario& scenario,
                          const PipelineManifest& manifest,
                          const ScalarField* dep_tracking) {
  const GridSpec grid = resolve_grid(scenario, kind, manifest);
  SolveConfig cfg;
  cfg.horizon = manifest.horizon > 0.0 ? manifest.horizon : default_horizon(kind);
  cfg.cfl = manifest.cfl;
  cfg.tolerance = manifest.tolerance;
  cfg.log_progress = manifest.verbose;

  SolveOutput out;
  switch (kind) {
    case SolveKind::VerticalTracking: {
      const auto model =
          DynamicsModel::from_scenario(ModelId::RelVertical2D, scenario);
      out.sol = solve_max_tracking(model, build_tracking_cost_z(grid), cfg);
      out.dynamics = model_name(model.id);
      break;
    }
    case SolveKind::HorizontalTracking: {
      const auto model =
          DynamicsModel::from_scenario(ModelId::RelHorizontal4D, scenario);
      out.sol = solve_max_tracking(model, build_tracking_cost_h(scenario, grid),
                                   cfg);
      out.dynamics = model_name(model.id);
      break;
    }
    case SolveKind::VerticalGame: {
      if (!dep_tracking)
        throw std::runtime_error(
            "vertical-game requires the vertical-tracking artifact");
      const auto model =
          DynamicsModel::from_scenario(ModelId::VerticalGame3D, scenario);
      const auto l = build_vertical_cost(scenario, grid,
                                         CaptureVariant::InvariantSet,
                                         dep_tracking);
      cfg.snapshot_dt = 0.1;
      cfg.extract_crossing_time = true;
      out.sol = solve_reach(model, l, cfg);
      out.dynamics = model_name(model.id);
      break;
    }
    case SolveKind::HorizontalGame: {
      if (!dep_tracking)
        throw std::runtime_error(
            "horizontal-game requires the horizontal-tracking artifact");
      const auto model =
          DynamicsModel::from_scenario(ModelId::HorizontalGame6D, scenario);
      const auto costs = build_horizontal_costs(
          scenario, grid, CaptureVariant::InvariantSet, dep_tracking);
      out.sol = solve_reach_avoid(model, costs.l, costs.g, cfg);
      out.dynamics = model_name(model.id);
      break;
    }
    case SolveKind::AttackerReach: {
      const auto model =
          DynamicsModel::from_scenario(ModelId::AttackerReach2D, scenario);
      const auto costs = build_attacker_reach_costs(scenario, grid);
      cfg.snapshot_dt = 0.1;
      cfg.extract_crossing_time = true;
      out.sol = costs.has_obstacles
                    ? solve_reach_avoid(model, costs.l, costs.g, cfg)
                    : solve_reach(model, costs.l, cfg);
      out.dynamics = model_name(model.id);
      break;
    }
  }
  return out;
}

void write_solution(const std::string& dir, SolveKind kind,
                    const SolveOutput& out, const Scenario& scenario,
                    const PipelineManifest& manifest, double wall_ms) {
  fs::create_directories(dir);
  const std::string field_path = dir + "/" + artifact_file(kind);
  write_hjvf(field_path, out.sol.field);
  FieldMeta meta;
  meta.dynamics = out.dynamics;
  meta.parameter_hash = scenario.hash();
  meta.horizon = out.sol.final_horizon;
  meta.tolerance = manifest.tolerance;
  meta.iterations = out.sol.sup_change_history.size();
  meta.converged = out.sol.converged;
  meta.wall_ms = wall_ms;
  write_meta(field_path, meta);

  if (const char* tf = time_file(kind); tf && out.sol.crossing_time) {
    const std::string tpath = dir + "/" + tf;
    ScalarField tfield;
    tfield.spec = out.sol.crossing_time->spec;
    tfield.values = out.sol.crossing_time->times;
    write_hjvf(tpath, tfield);
    FieldMeta tmeta = meta;
    tmeta.dynamics = kind == SolveKind::VerticalGame ? "t_capture" : "t_goal";
    write_meta(tpath, tmeta);
  }
}

ScalarField load_dependency(const Scenario& scenario, const std::string& dir,
                            SolveKind dep) {
  const std::string path = dir + "/" + artifact_file(dep);
  if (!fs::exists(path))
    throw std::runtime_error(std::string("missing dependency artifact: ") +
                             path + " (run solve " + solve_kind_name(dep) +
                             " first)");
  const FieldMeta meta = read_meta(path);
  if (meta.parameter_hash != scenario.hash())
    throw std::runtime_error("stale dependency artifact (scenario hash "
                             "mismatch): " + path);
  return read_hjvf(path);
}

}  // namespace

int cmd_solve(SolveKind kind, const PipelineManifest& manifest) {
  const Scenario scenario = Scenario::load(manifest.scenario_path);
  std::optional<ScalarField> dep;
  if (kind == SolveKind::VerticalGame)
    dep = load_dependency(scenario, manifest.out_dir,
                          SolveKind::VerticalTracking);
  else if (kind == SolveKind::HorizontalGame)
    dep = load_dependency(scenario, manifest.out_dir,
                          SolveKind::HorizontalTracking);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveOutput out =
      run_one_solve(kind, scenario, manifest, dep ? &*dep : nullptr);
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  write_solution(manifest.out_dir, kind, out, scenario, manifest, wall_ms);

  std::printf(
      "solve %s: converged=%s horizon=%.3f iterations=%zu sup_change=%.3e "
      "wall=%.0fms\n",
      solve_kind_name(kind), out.sol.converged ? "true" : "false",
      out.sol.final_horizon, out.sol.sup_change_history.size(),
      out.sol.sup_change_history.empty() ? 0.0
                                         : out.sol.sup_change_history.back(),
      wall_ms);
  return 0;
}

namespace {

TimeField read_time_field(const std::string& path) {
  ScalarField f = read_hjvf(path);
  TimeField t;
  t.spec = f.spec;
  t.times = std::move(f.values);
  return t;
}

ValueSolution load_value(const Scenario& scenario, const std::string& dir,
                         SolveKind kind) {
  const std::string path = dir + "/" + artifact_file(kind);
  if (!fs::exists(path))
    throw std::runtime_error(std::string("missing artifact: ") + path);
  const FieldMeta meta = read_meta(path);
  if (meta.parameter_hash != scenario.hash())
    throw std::runtime_error("stale artifact (scenario hash mismatch): " + path);
  ValueSolution sol;
  sol.field = read_hjvf(path);
  sol.converged = meta.converged;
  sol.final_horizon = meta.horizon;
  return sol;
}

}  // namespace

GameArtifacts load_artifacts(const Scenario& scenario,
                             const std::string& out_dir) {
  GameArtifacts art;
  art.scenario = scenario;
  art.v_z = load_value(scenario, out_dir, SolveKind::VerticalTracking);
  art.v_h = load_value(scenario, out_dir, SolveKind::HorizontalTracking);
  art.phi_z = load_value(scenario, out_dir, SolveKind::VerticalGame);
  art.phi_h = load_value(scenario, out_dir, SolveKind::HorizontalGame);
  art.attacker_reach = load_value(scenario, out_dir, SolveKind::AttackerReach);
  art.t_capture = read_time_field(out_dir + "/t_capture.hjvf");
  art.t_goal = read_time_field(out_dir + "/t_goal.hjvf");
  if (read_meta(out_dir + "/t_capture.hjvf").parameter_hash != scenario.hash() ||
      read_meta(out_dir + "/t_goal.hjvf").parameter_hash != scenario.hash())
    throw std::runtime_error("stale time field (scenario hash mismatch)");
  return art;
}

GameArtifacts solve_all(const Scenario& scenario,
                        const PipelineManifest& manifest) {
  const bool cache = !manifest.out_dir.empty();
  auto fresh = [&](SolveKind kind) {
    if (!cache) return false;
    const std::string path = manifest.out_dir + "/" + artifact_file(kind);
    if (!fs::exists(path)) return false;
    try {
      return read_meta(path).parameter_hash == scenario.hash();
    } catch (const std::exception&) {
      return false;
    }
  };
  auto obtain = [&](SolveKind kind, const ScalarField* dep) {
    if (fresh(kind)) {
      ValueSolution sol = load_value(scenario, manifest.out_dir, kind);
      if (manifest.verbose)
        std::fprintf(stderr, "reusing cached %s\n", artifact_file(kind));
      return sol;
    }
    const auto t0 = std::chrono::steady_clock::now();
    SolveOutput out = run_one_solve(kind, scenario, manifest, dep);
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
    if (cache) write_solution(manifest.out_dir, kind, out, scenario, manifest,
                              wall_ms);
    return std::move(out.sol);
  };

  GameArtifacts art;
  art.scenario = scenario;
  art.v_z = obtain(SolveKind::VerticalTracking, nullptr);
  art.v_h = obtain(SolveKind::HorizontalTracking, nullptr);

  const bool phi_z_fresh = fresh(SolveKind::VerticalGame) &&
                           fs::exists(manifest.out_dir + "/t_capture.hjvf");
  art.phi_z = obtain(SolveKind::VerticalGame, &art.v_z.field);
  if (phi_z_fresh)
    art.t_capture = read_time_field(manifest.out_dir + "/t_capture.hjvf");
  else if (art.phi_z.crossing_time)
    art.t_capture = *art.phi_z.crossing_time;
  else
    art.t_capture = read_time_field(manifest.out_dir + "/t_capture.hjvf");

  const bool reach_fresh = fresh(SolveKind::AttackerReach) &&
                           fs::exists(manifest.out_dir + "/t_goal.hjvf");
  art.attacker_reach = obtain(SolveKind::AttackerReach, nullptr);
  if (reach_fresh)
    art.t_goal = read_time_field(manifest.out_dir + "/t_goal.hjvf");
  else if (art.attacker_reach.crossing_time)
    art.t_goal = *art.attacker_reach.crossing_time;
  else
    art.t_goal = read_time_field(manifest.out_dir + "/t_goal.hjvf");

  art.phi_h = obtain(SolveKind::HorizontalGame, &art.v_h.field);
  return art;
}

std::vector<JointState9> read_states_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open states file " + path);
  json j;
  is >> j;
  if (!j.is_array()) throw std::runtime_error("states file must be an array");
  std::vector<JointState9> out;
  for (const auto& sj : j) {
    if (!sj.is_array() || sj.size() != 9)
      throw std::runtime_error("each state must be a 9-number array");
    JointState9 s;
    s.xd = sj[0].get<double>();
    s.yd = sj[1].get<double>();
    s.zd = sj[2].get<double>();
    s.vxd = sj[3].get<double>();
    s.vyd = sj[4].get<double>();
    s.vzd = sj[5].get<double>();
    s.xa = sj[6].get<double>();
    s.ya = sj[7].get<double>();
    s.za = sj[8].get<double>();
    out.push_back(s);
  }
  return out;
}

int cmd_classify(const PipelineManifest& manifest,
                 const std::string& states_path, const std::string& out_path) {
  const Scenario scenario = Scenario::load(manifest.scenario_path);
  const GameArtifacts art = load_artifacts(scenario, manifest.out_dir);
  const auto states = read_states_json(states_path);

  json results = json::array();
  std::size_t indeterminate = 0;
  for (const auto& s : states) {
    const ClassificationResult r = classify(s, art);
    if (r.verdict == Verdict::Indeterminate) ++indeterminate;
    json rj;
    rj["state"] = {s.xd, s.yd, s.zd, s.vxd, s.vyd, s.vzd, s.xa, s.ya, s.za};
    rj["verdict"] = verdict_name(r.verdict);
    rj["rule"] = rule_name(r.rule);
    rj["clamped"] = r.clamped;
    rj["evidence"] = r.evidence;
    results.push_back(rj);
  }
  json out;
  out["scenario_hash"] = scenario.hash();
  out["seed"] = manifest.seed;
  out["results"] = results;
  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + out_path);
  os << out.dump(2) << "\n";

  std::printf("classified %zu states (%zu indeterminate)\n", states.size(),
              indeterminate);
  return manifest.strict && indeterminate > 0 ? 1 : 0;
}

int cmd_simulate(const PipelineManifest& manifest,
                 const std::string& states_path,
                 const std::string& defender_sel,
                 const std::string& attacker_sel, double max_duration) {
  const Scenario scenario = Scenario::load(manifest.scenario_path);
  const GameArtifacts art = load_artifacts(scenario, manifest.out_dir);
  const auto states = read_states_json(states_path);

  SimConfig cfg;
  cfg.max_duration = max_duration;
  int wins_d = 0, wins_a = 0, timeouts = 0;
  fs::create_directories(manifest.out_dir);

  for (std::size_t i = 0; i < states.size(); ++i) {
    std::unique_ptr<DefenderPolicy> defender;
    if (defender_sel == "reach-track")
      defender = std::make_unique<ReachTrackDefender>(art, ControllerConfig{});
    else if (defender_sel == "zero")
      defender = std::make_unique<ZeroDefender>();
    else
      throw std::invalid_argument("unknown defender policy: " + defender_sel);

    std::unique_ptr<AttackerPolicy> attacker;
    if (attacker_sel == "adversarial")
      attacker = std::make_unique<AdversarialAttacker>(art);
    else if (attacker_sel == "goal")
      attacker = std::make_unique<GoalSeekingAttacker>(art);
    else if (attacker_sel == "zero")
      attacker = std::make_unique<ZeroAttacker>();
    else
      throw std::invalid_argument("unknown attacker policy: " + attacker_sel);

    const TrajectoryLog log =
        run(scenario, states[i], *defender, *attacker, cfg, &art);
    switch (log.outcome) {
      case Outcome::DefenderWins: ++wins_d; break;
      case Outcome::AttackerWins: ++wins_a; break;
      case Outcome::Timeout: ++timeouts; break;
    }
    char base[64];
    std::snprintf(base, sizeof(base), "sim_%03zu", i);
    write_trajectory_csv(manifest.out_dir + "/" + base + ".csv", log);
    write_events_json(manifest.out_dir + "/" + base + ".events.json", log,
                      scenario.hash(), manifest.seed);
  }
  std::printf("simulated %zu runs: DefenderWins=%d AttackerWins=%d Timeout=%d\n",
              states.size(), wins_d, wins_a, timeouts);
  return 0;
}

int cmd_export_slice(const std::string& field_path,
                     const std::vector<std::pair<int, double>>& fixed,
                     const std::string& out_csv) {
  const ScalarField field = read_hjvf(field_path);
  const int d = field.spec.ndim();
  if (static_cast<int>(fixed.size()) != d - 2)
    throw std::invalid_argument(
        "export-slice: fix all but exactly two axes (" + std::to_string(d - 2) +
        " assignments needed)");

  std::array<int, kMaxDim> pin{};
  std::array<bool, kMaxDim> is_fixed{};
  for (const auto& [axis, value] : fixed) {
    if (axis < 0 || axis >= d)
      throw std::invalid_argument("export-slice: axis out of range");
    if (is_fixed[axis])
      throw std::invalid_argument("export-slice: axis fixed twice");
    is_fixed[axis] = true;
    pin[axis] = field.spec.nearest(axis, value);
    std::printf("axis %d snapped to node %d (%.6g)\n", axis, pin[axis],
                field.spec.coord(axis, pin[axis]));
  }
  int free_a = -1, free_b = -1;
  for (int a = 0; a < d; ++a) {
    if (is_fixed[a]) continue;
    (free_a < 0 ? free_a : free_b) = a;
  }

  std::ofstream os(out_csv, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + out_csv);
  os << "coord" << free_a << ",coord" << free_b << ",value\n";
  std::array<int, kMaxDim> idx = pin;
  char line[128];
  for (int i = 0; i < field.spec.axis(free_a).count; ++i) {
    for (int j = 0; j < field.spec.axis(free_b).count; ++j) {
      idx[free_a] = i;
      idx[free_b] = j;
      std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n",
                    field.spec.coord(free_a, i), field.spec.coord(free_b, j),
                    field.values[field.spec.flatten(
                        std::span<const int>(idx.data(), d))]);
      os << line;
    }
  }
  std::printf("wrote %d rows to %s\n",
              field.spec.axis(free_a).count * field.spec.axis(free_b).count,
              out_csv.c_str());
  return 0;
}

int cmd_oracle_diff(const std::string& path_a, const std::string& path_b) {
  const ScalarField a = read_hjvf(path_a);
  const ScalarField b = read_hjvf(path_b);
  if (!(a.spec == b.spec)) {
    std::fprintf(stderr, "oracle-diff: grids differ\n");
    return 1;
  }
  double max_abs = 0.0, sum_abs = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    const double d = std::abs(a.values[n] - b.values[n]);
    max_abs = std::max(max_abs, d);
    sum_abs += d;
  }
  const double disp = boundary_displacement(a, b);
  std::printf("max_abs_diff=%.6g mean_abs_diff=%.6g boundary_displacement=%.6g\n",
              max_abs, sum_abs / a.values.size(), disp);
  return 0;
}

}  // namespace hjra
