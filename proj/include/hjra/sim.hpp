#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hjra/analysis.hpp"
#include "hjra/control.hpp"
#include "hjra/dynamics.hpp"
#include "hjra/geometry.hpp"

namespace hjra {

struct SimConfig {
  double dt = 0.02;           // s; capped at 0.05 for control-rate realism
  double max_duration = 40.0; // s
  int log_stride = 1;
  bool terminate_on_events = true;  // false = observe past the first win
};

struct SimEvent {
  std::string type;
  double t = 0.0;
};

enum class Outcome { DefenderWins, AttackerWins, Timeout };
const char* outcome_name(Outcome o);

struct TrajectoryPoint {
  double t = 0.0;
  JointState9 x;
  std::array<double, 3> u_d{0, 0, 0};
  std::array<double, 3> u_a{0, 0, 0};
  PolicyMode mode_h = PolicyMode::Reach;
  PolicyMode mode_z = PolicyMode::Reach;
  double v_h = 0.0;  // V_h reading at the relative state
  double v_z = 0.0;  // V_z reading
};

struct TrajectoryLog {
  std::vector<TrajectoryPoint> points;
  std::vector<SimEvent> events;
  Outcome outcome = Outcome::Timeout;
  double end_time = 0.0;
  bool initial_clamped = false;

  const SimEvent* find_event(const std::string& type) const;
};

struct DefenderDecision {
  std::array<double, 3> u{0, 0, 0};
  PolicyMode mode_h = PolicyMode::Reach;
  PolicyMode mode_z = PolicyMode::Reach;
  double v_h = 0.0;
  double v_z = 0.0;
};

class DefenderPolicy {
 public:
  virtual ~DefenderPolicy() = default;
  virtual DefenderDecision act(const JointState9& x, double t, double dt) = 0;
};

class AttackerPolicy {
 public:
  virtual ~AttackerPolicy() = default;
  virtual std::array<double, 3> act(const JointState9& x, double t) = 0;
};

// The switching reach-track defender (both sub-games).
class ReachTrackDefender : public DefenderPolicy {
 public:
  ReachTrackDefender(const GameArtifacts& artifacts, ControllerConfig cfg);
  DefenderDecision act(const JointState9& x, double t, double dt) override;
  const ControllerState& memory() const { return mem_; }

 private:
  const GameArtifacts& artifacts_;
  ControllerConfig cfg_;
  ControllerState mem_;
};

class ZeroDefender : public DefenderPolicy {
 public:
  DefenderDecision act(const JointState9&, double, double) override {
    return {};
  }
};

// Fully adversarial attacker: plays each sub-game's optimal evasion, and
// switches to the tracking-phase adversary once inside the invariant set.
class AdversarialAttacker : public AttackerPolicy {
 public:
  explicit AdversarialAttacker(const GameArtifacts& artifacts)
      : artifacts_(artifacts) {}
  std::array<double, 3> act(const JointState9& x, double t) override;

 private:
  const GameArtifacts& artifacts_;
};

// Prop-1 construction: shortest obstacle-avoiding path to the goal
// horizontally, optimal evasion vertically.
class GoalSeekingAttacker : public AttackerPolicy {
 public:
  explicit GoalSeekingAttacker(const GameArtifacts& artifacts)
      : artifacts_(artifacts) {}
  std::array<double, 3> act(const JointState9& x, double t) override;

 private:
  const GameArtifacts& artifacts_;
};

class ZeroAttacker : public AttackerPolicy {
 public:
  std::array<double, 3> act(const JointState9&, double) override {
    return {0, 0, 0};
  }
};

// One forward-Euler step of the joint 9D flow.
JointState9 step(const Scenario& scenario, const JointState9& x,
                 const std::array<double, 3>& u_d,
                 const std::array<double, 3>& u_a, double dt);

// Closed-loop run until the first terminal event (target entry, obstacle
// hit, cylinder capture outside the target) or timeout. Artifacts, when
// given, are used to flag initial states outside the solve domains.
TrajectoryLog run(const Scenario& scenario, const JointState9& initial,
                  DefenderPolicy& defender, AttackerPolicy& attacker,
                  const SimConfig& cfg,
                  const GameArtifacts* artifacts = nullptr);

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);
void write_events_json(const std::string& path, const TrajectoryLog& log,
                       const std::string& scenario_hash,
                       std::uint64_t seed);

}  // namespace hjra
