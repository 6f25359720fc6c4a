#include "hjra/control.hpp"

#include <cmath>
#include <stdexcept>

namespace hjra {

const char* mode_name(PolicyMode m) {
  switch (m) {
    case PolicyMode::Reach: return "Reach";
    case PolicyMode::TrackBoundary: return "TrackBoundary";
    case PolicyMode::TrackDeep: return "TrackDeep";
    case PolicyMode::OutsideWinningRegion: return "OutsideWinningRegion";
  }
  return "?";
}

void ControllerState::observe_attacker(const std::array<double, 3>& pos,
                                       double dt) {
  if (prev_attacker_pos && dt > 0.0) {
    for (int i = 0; i < 3; ++i)
      attacker_velocity_estimate[i] = (pos[i] - (*prev_attacker_pos)[i]) / dt;
  } else {
    attacker_velocity_estimate = {0.0, 0.0, 0.0};
  }
  prev_attacker_pos = pos;
}

namespace {

// Band selection against the capture radius d with a deep-inside band eps.
// With hysteresis h, leaving the current band requires crossing its
// threshold by h.
PolicyMode select_band(double r, double d, double eps, double h,
                       std::optional<PolicyMode> prev) {
  auto base = [&](double v) {
    if (v > d) return PolicyMode::Reach;
    if (v <= d - eps) return PolicyMode::TrackDeep;
    return PolicyMode::TrackBoundary;
  };
  if (!prev || h <= 0.0) return base(r);
  switch (*prev) {
    case PolicyMode::Reach:
      if (r > d - h) return PolicyMode::Reach;
      return base(r);
    case PolicyMode::TrackBoundary:
      if (r > d + h) return PolicyMode::Reach;
      if (r <= d - eps - h) return PolicyMode::TrackDeep;
      return PolicyMode::TrackBoundary;
    case PolicyMode::TrackDeep:
      if (r > d + h) return PolicyMode::Reach;
      if (r > d - eps + h) return PolicyMode::TrackBoundary;
      return PolicyMode::TrackDeep;
    default:
      return base(r);
  }
}

void log_transition(ControllerState& mem, std::optional<PolicyMode>& last,
                    PolicyMode now, Game game, double t) {
  if (last && *last != now)
    mem.transitions.push_back(ModeTransition{t, game, *last, now});
  last = now;
}

}  // namespace

double performant_tracker_z(double z_rel, double attacker_vz,
                            const ControllerConfig& cfg, double bound) {
  double u = cfg.kv * attacker_vz - cfg.kp * z_rel;
  if (u > bound) u = bound;
  if (u < -bound) u = -bound;
  return u;
}

std::array<double, 2> performant_tracker_h(double x_rel, double y_rel,
                                           double attacker_vx,
                                           double attacker_vy,
                                           const ControllerConfig& cfg,
                                           double bound) {
  double ux = cfg.kv * attacker_vx - cfg.kp * x_rel;
  double uy = cfg.kv * attacker_vy - cfg.kp * y_rel;
  const double norm = std::hypot(ux, uy);
  if (norm > bound) {
    ux *= bound / norm;
    uy *= bound / norm;
  }
  return {ux, uy};
}

VerticalDecision defender_vertical(const VerticalState3& state,
                                   const GameArtifacts& artifacts,
                                   const ControllerConfig& cfg,
                                   ControllerState& mem, double t) {
  const Scenario& scn = artifacts.scenario;
  const RelVertState2 rel{state[0] - state[2], state[1]};
  VerticalDecision out;
  out.tracking_value = interpolate(artifacts.v_z.field, rel);

  const PolicyMode band = select_band(out.tracking_value, scn.d_z, cfg.eps_z,
                                      cfg.hysteresis, mem.band_z);
  mem.band_z = band;

  switch (band) {
    case PolicyMode::Reach: {
      std::array<double, 3> grad{};
      gradient_at(artifacts.phi_z.field, state, grad);
      const auto m = DynamicsModel::from_scenario(ModelId::VerticalGame3D, scn);
      out.command = m.optimal_control(grad, Player::Defender).u[0];
      break;
    }
    case PolicyMode::TrackBoundary: {
      std::array<double, 2> grad{};
      gradient_at(artifacts.v_z.field, rel, grad);
      const auto m = DynamicsModel::from_scenario(ModelId::RelVertical2D, scn);
      out.command = m.optimal_control(grad, Player::Defender).u[0];
      break;
    }
    default:
      out.command = performant_tracker_z(
          rel[0], mem.attacker_velocity_estimate[2], cfg, scn.u_z_d);
      break;
  }

  const auto w = in_winning_region(artifacts.phi_z, state, Side::Defender,
                                   Game::Vertical);
  out.mode = w.member ? band : PolicyMode::OutsideWinningRegion;
  log_transition(mem, mem.reported_z, out.mode, Game::Vertical, t);
  return out;
}

HorizontalDecision defender_horizontal(const HorizontalState6& state,
                                       const GameArtifacts& artifacts,
                                       const ControllerConfig& cfg,
                                       ControllerState& mem, double t) {
  const Scenario& scn = artifacts.scenario;
  const RelHorizState4 rel{state[0] - state[4], state[1] - state[5], state[2],
                           state[3]};
  HorizontalDecision out;
  out.tracking_value = interpolate(artifacts.v_h.field, rel);

  const PolicyMode band = select_band(out.tracking_value, scn.d_h,
                                      cfg.eps_track, cfg.hysteresis, mem.band_h);
  mem.band_h = band;

  switch (band) {
    case PolicyMode::Reach: {
      std::array<double, 6> grad{};
      gradient_at(artifacts.phi_h.field, state, grad);
      const auto m =
          DynamicsModel::from_scenario(ModelId::HorizontalGame6D, scn);
      const Control u = m.optimal_control(grad, Player::Defender);
      out.command = {u.u[0], u.u[1]};
      break;
    }
    case PolicyMode::TrackBoundary: {
      std::array<double, 4> grad{};
      gradient_at(artifacts.v_h.field, rel, grad);
      const auto m =
          DynamicsModel::from_scenario(ModelId::RelHorizontal4D, scn);
      const Control u = m.optimal_control(grad, Player::Defender);
      out.command = {u.u[0], u.u[1]};
      break;
    }
    default:
      out.command = performant_tracker_h(rel[0], rel[1],
                                         mem.attacker_velocity_estimate[0],
                                         mem.attacker_velocity_estimate[1],
                                         cfg, scn.u_h_d);
      break;
  }

  const auto w = in_winning_region(artifacts.phi_h, state, Side::Defender,
                                   Game::Horizontal);
  out.mode = w.member ? band : PolicyMode::OutsideWinningRegion;
  log_transition(mem, mem.reported_h, out.mode, Game::Horizontal, t);
  return out;
}

Control attacker_adversarial(std::span<const double> state,
                             const GameArtifacts& artifacts, Game game,
                             Phase phase) {
  const Scenario& scn = artifacts.scenario;
  if (game == Game::Vertical) {
    if (phase == Phase::Game) {
      if (state.size() != 3)
        throw std::invalid_argument("attacker_adversarial: need (z_D,v_z,z_A)");
      std::array<double, 3> grad{};
      gradient_at(artifacts.phi_z.field, state, grad);
      return DynamicsModel::from_scenario(ModelId::VerticalGame3D, scn)
          .optimal_control(grad, Player::Attacker);
    }
    if (state.size() != 2)
      throw std::invalid_argument("attacker_adversarial: need (z_rel,v_z)");
    std::array<double, 2> grad{};
    gradient_at(artifacts.v_z.field, state, grad);
    return DynamicsModel::from_scenario(ModelId::RelVertical2D, scn)
        .optimal_control(grad, Player::Attacker);
  }
  if (phase == Phase::Game) {
    if (state.size() != 6)
      throw std::invalid_argument("attacker_adversarial: need 6D state");
    std::array<double, 6> grad{};
    gradient_at(artifacts.phi_h.field, state, grad);
    return DynamicsModel::from_scenario(ModelId::HorizontalGame6D, scn)
        .optimal_control(grad, Player::Attacker);
  }
  if (state.size() != 4)
    throw std::invalid_argument("attacker_adversarial: need 4D relative state");
  std::array<double, 4> grad{};
  gradient_at(artifacts.v_h.field, state, grad);
  return DynamicsModel::from_scenario(ModelId::RelHorizontal4D, scn)
      .optimal_control(grad, Player::Attacker);
}

Control attacker_goal_seeking(std::span<const double> position,
                              const GameArtifacts& artifacts) {
  if (position.size() != 2)
    throw std::invalid_argument("attacker_goal_seeking: need (x, y)");
  std::array<double, 2> grad{};
  gradient_at(artifacts.attacker_reach.field, position, grad);
  return DynamicsModel::from_scenario(ModelId::AttackerReach2D,
                                      artifacts.scenario)
      .optimal_control(grad, Player::Attacker);
}

}  // namespace hjra
