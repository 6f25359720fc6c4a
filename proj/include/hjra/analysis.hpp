#pragma once

#include <map>
#include <string>

#include "hjra/dynamics.hpp"
#include "hjra/geometry.hpp"
#include "hjra/hji.hpp"

namespace hjra {

// Everything the classifier and the controllers consume. phi_h / phi_z are
// the sub-game values solved with the invariant capture sets as targets.
struct GameArtifacts {
  Scenario scenario;
  ValueSolution phi_h;           // 6D horizontal game value
  ValueSolution phi_z;           // 3D vertical game value
  ValueSolution v_z;             // 2D vertical tracking value, converged
  ValueSolution v_h;             // 4D horizontal tracking value at horizon T
  ValueSolution attacker_reach;  // 2D attacker-only goal value
  TimeField t_capture;           // 3D earliest vertical capture time
  TimeField t_goal;              // 2D shortest obstacle-avoiding goal time
};

enum class Verdict { DefenderGuaranteed, AttackerGuaranteed, Indeterminate };
enum class Rule { Prop1, Prop2, Prop3, Theorem, None };

const char* verdict_name(Verdict v);
const char* rule_name(Rule r);

struct ClassificationResult {
  Verdict verdict = Verdict::Indeterminate;
  Rule rule = Rule::None;
  std::map<std::string, double> evidence;
  bool clamped = false;  // some consulted query left its grid domain
};

enum class Side { Defender, Attacker };
enum class Game { Horizontal, Vertical };

struct Membership {
  bool member = false;
  double margin = 0.0;
  bool clamped = false;
};

// Level-set membership of the interpolated value. The horizontal game puts
// the defender on the super-zero side; the vertical game flips the
// convention (defender wins on the sub-zero side, boundary included).
// safety_margin > 0 tightens the defender side by that amount.
Membership in_winning_region(const ValueSolution& solution,
                             std::span<const double> state, Side side,
                             Game game, double safety_margin = 0.0);

// Multilinear interpolation with +inf-absorbing corners: if any enclosing
// node is +inf the query is +inf.
double query_time(const TimeField& field, std::span<const double> point,
                  bool* clamped = nullptr);

struct ClassifyOptions {
  double safety_margin = 0.0;
};

// Outcome classifier over the joint state. Checks, in order: the attacker's
// guaranteed win (goal reached no later than vertical capture), then the
// defender's guarantees (combined sub-game win; horizontal win with vertical
// capture already invariant; vertical win with horizontal capture already
// invariant). Queries that leave their grid make the verdict Indeterminate.
ClassificationResult classify(const JointState9& state,
                              const GameArtifacts& artifacts,
                              const ClassifyOptions& opts = {});

}  // namespace hjra
