#include "hjra/sim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hjra {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::DefenderWins: return "DefenderWins";
    case Outcome::AttackerWins: return "AttackerWins";
    case Outcome::Timeout: return "Timeout";
  }
  return "?";
}

const SimEvent* TrajectoryLog::find_event(const std::string& type) const {
  for (const auto& e : events)
    if (e.type == type) return &e;
  return nullptr;
}

ReachTrackDefender::ReachTrackDefender(const GameArtifacts& artifacts,
                                       ControllerConfig cfg)
    : artifacts_(artifacts), cfg_(cfg) {}

DefenderDecision ReachTrackDefender::act(const JointState9& x, double t,
                                         double dt) {
  mem_.observe_attacker({x.xa, x.ya, x.za}, dt);
  const auto dv = defender_vertical(project_vertical(x), artifacts_, cfg_, mem_, t);
  const auto dh =
      defender_horizontal(project_horizontal(x), artifacts_, cfg_, mem_, t);
  DefenderDecision out;
  out.u = {dh.command[0], dh.command[1], dv.command};
  out.mode_h = dh.mode;
  out.mode_z = dv.mode;
  out.v_h = dh.tracking_value;
  out.v_z = dv.tracking_value;
  return out;
}

std::array<double, 3> AdversarialAttacker::act(const JointState9& x, double) {
  const Scenario& scn = artifacts_.scenario;
  const auto rel_z = project_rel_vertical(x);
  const auto rel_h = project_rel_horizontal(x);

  Control uz;
  if (interpolate(artifacts_.v_z.field, rel_z) <= scn.d_z)
    uz = attacker_adversarial(rel_z, artifacts_, Game::Vertical, Phase::Tracking);
  else
    uz = attacker_adversarial(project_vertical(x), artifacts_, Game::Vertical,
                              Phase::Game);

  Control uh;
  if (interpolate(artifacts_.v_h.field, rel_h) <= scn.d_h)
    uh = attacker_adversarial(rel_h, artifacts_, Game::Horizontal,
                              Phase::Tracking);
  else
    uh = attacker_adversarial(project_horizontal(x), artifacts_,
                              Game::Horizontal, Phase::Game);

  return {uh.u[0], uh.u[1], uz.u[0]};
}

std::array<double, 3> GoalSeekingAttacker::act(const JointState9& x, double) {
  const double pos[2] = {x.xa, x.ya};
  const Control uh = attacker_goal_seeking(pos, artifacts_);
  const Control uz = attacker_adversarial(project_vertical(x), artifacts_,
                                          Game::Vertical, Phase::Game);
  return {uh.u[0], uh.u[1], uz.u[0]};
}

JointState9 step(const Scenario& scenario, const JointState9& x,
                 const std::array<double, 3>& u_d,
                 const std::array<double, 3>& u_a, double dt) {
  for (double v : {x.xd, x.yd, x.zd, x.vxd, x.vyd, x.vzd, x.xa, x.ya, x.za,
                   u_d[0], u_d[1], u_d[2], u_a[0], u_a[1], u_a[2], dt})
    if (!std::isfinite(v)) throw std::invalid_argument("step: non-finite input");
  if (std::hypot(u_d[0], u_d[1]) > scenario.u_h_d + 1e-9 ||
      std::abs(u_d[2]) > scenario.u_z_d + 1e-9 ||
      std::hypot(u_a[0], u_a[1]) > scenario.u_h_a + 1e-9 ||
      std::abs(u_a[2]) > scenario.u_z_a + 1e-9)
    throw std::invalid_argument("step: command violates speed bounds");

  JointState9 n = x;
  n.xd += dt * x.vxd;
  n.yd += dt * x.vyd;
  n.zd += dt * x.vzd;
  n.vxd += dt * scenario.k_x * (u_d[0] - x.vxd);
  n.vyd += dt * scenario.k_y * (u_d[1] - x.vyd);
  n.vzd += dt * scenario.k_z * (u_d[2] - x.vzd);
  n.xa += dt * u_a[0];
  n.ya += dt * u_a[1];
  n.za += dt * u_a[2];
  return n;
}

namespace {

struct EventTracker {
  bool capture_h = false, capture_z = false, capture_3d = false;
  bool terminal = false;
  Outcome outcome = Outcome::Timeout;
};

// Terminal-check order within a step: target entry, obstacle hits, capture.
// Capture inside the target does not count.
void check_events(const Scenario& scn, const JointState9& x, double t,
                  TrajectoryLog& log, EventTracker& trk) {
  const bool in_target = scn.target_sdf(x.xa, x.ya) <= 0.0;
  const double dist_h = std::hypot(x.xa - x.xd, x.ya - x.yd);
  const double dist_z = std::abs(x.za - x.zd);
  const bool cap_h = dist_h <= scn.d_h;
  const bool cap_z = dist_z <= scn.d_z;

  if (cap_h && !trk.capture_h) {
    trk.capture_h = true;
    log.events.push_back({"capture_h", t});
  }
  if (cap_z && !trk.capture_z) {
    trk.capture_z = true;
    log.events.push_back({"capture_z", t});
  }

  if (!trk.terminal && in_target) {
    log.events.push_back({"goal_reached", t});
    trk.terminal = true;
    trk.outcome = Outcome::AttackerWins;
    return;
  }
  if (!trk.terminal && !scn.obstacles.empty()) {
    if (scn.obstacle_sdf(x.xd, x.yd) <= 0.0) {
      log.events.push_back({"defender_obstacle_hit", t});
      trk.terminal = true;
      trk.outcome = Outcome::AttackerWins;
      return;
    }
    if (scn.obstacle_sdf(x.xa, x.ya) <= 0.0) {
      log.events.push_back({"attacker_obstacle_hit", t});
      trk.terminal = true;
      trk.outcome = Outcome::DefenderWins;
      return;
    }
  }
  if (cap_h && cap_z && !in_target && !trk.capture_3d) {
    trk.capture_3d = true;
    log.events.push_back({"capture_3d", t});
    if (!trk.terminal) {
      trk.terminal = true;
      trk.outcome = Outcome::DefenderWins;
    }
  }
}

bool inside_grid(const GridSpec& spec, std::span<const double> x) {
  for (int a = 0; a < spec.ndim(); ++a)
    if (x[a] < spec.axis(a).lo || x[a] > spec.axis(a).hi) return false;
  return true;
}

}  // namespace

TrajectoryLog run(const Scenario& scenario, const JointState9& initial,
                  DefenderPolicy& defender, AttackerPolicy& attacker,
                  const SimConfig& cfg, const GameArtifacts* artifacts) {
  if (!(cfg.dt > 0.0) || cfg.dt > 0.05 + 1e-12)
    throw std::invalid_argument("SimConfig: dt must be in (0, 0.05]");

  TrajectoryLog log;
  if (artifacts) {
    log.initial_clamped =
        !inside_grid(artifacts->phi_h.field.spec, project_horizontal(initial)) ||
        !inside_grid(artifacts->phi_z.field.spec, project_vertical(initial));
  }

  EventTracker trk;
  JointState9 x = initial;
  double t = 0.0;
  check_events(scenario, x, t, log, trk);

  std::size_t step_count = 0;
  bool first = true;
  while (true) {
    const bool done =
        (trk.terminal && cfg.terminate_on_events) || t >= cfg.max_duration - 1e-12;
    DefenderDecision ud{};
    std::array<double, 3> ua{0, 0, 0};
    if (!done) {
      ud = defender.act(x, t, first ? 0.0 : cfg.dt);
      ua = attacker.act(x, t);
    }
    if (done || step_count % std::max(1, cfg.log_stride) == 0) {
      TrajectoryPoint p;
      p.t = t;
      p.x = x;
      p.u_d = ud.u;
      p.u_a = ua;
      p.mode_h = ud.mode_h;
      p.mode_z = ud.mode_z;
      p.v_h = ud.v_h;
      p.v_z = ud.v_z;
      log.points.push_back(p);
    }
    if (done) break;
    x = step(scenario, x, ud.u, ua, cfg.dt);
    t += cfg.dt;
    ++step_count;
    first = false;
    check_events(scenario, x, t, log, trk);
  }

  if (!trk.terminal) log.events.push_back({"timeout", t});
  log.outcome = trk.outcome;
  log.end_time = t;
  return log;
}

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t,xD,yD,zD,vxD,vyD,vzD,xA,yA,zA,uxD,uyD,uzD,uxA,uyA,uzA,"
        "mode_h,mode_z,Vh,Vz\n";
  char line[512];
  for (const auto& p : log.points) {
    std::snprintf(line, sizeof(line),
                  "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                  "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%s,%.9g,%.9g\n",
                  p.t, p.x.xd, p.x.yd, p.x.zd, p.x.vxd, p.x.vyd, p.x.vzd,
                  p.x.xa, p.x.ya, p.x.za, p.u_d[0], p.u_d[1], p.u_d[2],
                  p.u_a[0], p.u_a[1], p.u_a[2], mode_name(p.mode_h),
                  mode_name(p.mode_z), p.v_h, p.v_z);
    os << line;
  }
}

void write_events_json(const std::string& path, const TrajectoryLog& log,
                       const std::string& scenario_hash, std::uint64_t seed) {
  nlohmann::json j;
  j["outcome"] = outcome_name(log.outcome);
  j["end_time"] = log.end_time;
  j["initial_clamped"] = log.initial_clamped;
  j["scenario_hash"] = scenario_hash;
  j["seed"] = seed;
  nlohmann::json evs = nlohmann::json::array();
  for (const auto& e : log.events) evs.push_back({{"type", e.type}, {"t", e.t}});
  j["events"] = evs;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

}  // namespace hjra
