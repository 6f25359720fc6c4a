#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjra/analysis.hpp"
#include "hjra/dynamics.hpp"

namespace hjra {

struct ControllerConfig {
  double eps_z = 0.2;      // vertical deep-inside band (m)
  double eps_track = 0.3;  // horizontal deep-inside band (m)
  double kp = 2.0;         // performant tracker position gain (1/s)
  double kv = 1.0;         // performant tracker velocity feed-forward gain
  double hysteresis = 0.0; // mode-switch hysteresis width (m)
};

enum class PolicyMode { Reach, TrackBoundary, TrackDeep, OutsideWinningRegion };
const char* mode_name(PolicyMode m);

struct ModeTransition {
  double t = 0.0;
  Game game = Game::Vertical;
  PolicyMode from = PolicyMode::Reach;
  PolicyMode to = PolicyMode::Reach;
};

// Per-simulation controller memory: the active band per sub-game (for
// hysteresis) and the attacker position history backing the finite-difference
// velocity estimate. Owned by a single simulation thread.
struct ControllerState {
  std::optional<PolicyMode> band_z;
  std::optional<PolicyMode> band_h;
  std::optional<PolicyMode> reported_z;
  std::optional<PolicyMode> reported_h;
  std::optional<std::array<double, 3>> prev_attacker_pos;
  std::array<double, 3> attacker_velocity_estimate{0.0, 0.0, 0.0};
  std::vector<ModeTransition> transitions;

  void observe_attacker(const std::array<double, 3>& pos, double dt);
};

struct VerticalDecision {
  double command = 0.0;
  PolicyMode mode = PolicyMode::Reach;
  double tracking_value = 0.0;  // V_z at the relative state
};

struct HorizontalDecision {
  std::array<double, 2> command{0.0, 0.0};
  PolicyMode mode = PolicyMode::Reach;
  double tracking_value = 0.0;  // V_h at the relative state
};

// Vertical reach-track switch: outside the invariant capture set, steer by
// the game value's costate; at its boundary, hold it with the tracking
// value's costate; deep inside, hand over to the performant tracker.
VerticalDecision defender_vertical(const VerticalState3& state,
                                   const GameArtifacts& artifacts,
                                   const ControllerConfig& cfg,
                                   ControllerState& mem, double t);

HorizontalDecision defender_horizontal(const HorizontalState6& state,
                                       const GameArtifacts& artifacts,
                                       const ControllerConfig& cfg,
                                       ControllerState& mem, double t);

enum class Phase { Game, Tracking };

// Optimal adversarial attacker command against the matching value function's
// interpolated costate.
Control attacker_adversarial(std::span<const double> state,
                             const GameArtifacts& artifacts, Game game,
                             Phase phase);

// Shortest-time goal-seeking command from the attacker-only reach value.
Control attacker_goal_seeking(std::span<const double> position,
                              const GameArtifacts& artifacts);

// Feed-forward plus proportional tracker for the deep-inside band:
// v_cmd = kv*v_attacker_estimate - kp*rel_position, clipped to the bounds.
double performant_tracker_z(double z_rel, double attacker_vz,
                            const ControllerConfig& cfg, double bound);
std::array<double, 2> performant_tracker_h(double x_rel, double y_rel,
                                           double attacker_vx,
                                           double attacker_vy,
                                           const ControllerConfig& cfg,
                                           double bound);

}  // namespace hjra
