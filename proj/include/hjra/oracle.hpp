#pragma once

#include <functional>
#include <vector>

#include "hjra/dynamics.hpp"
#include "hjra/grid.hpp"

namespace hjra {

struct OracleConfig {
  int disk_angles = 37;
  int interval_points = 11;
  double dt = 0.0;          // 0 = half the grid's CFL step at cfl 0.8
  double horizon = 10.0;
  double tolerance = 1e-3;  // sup-change per unit time
  bool stop_on_convergence = true;
  std::size_t node_cap = 200000;  // guards against accidental 6D runs
};

// Brute-force discrete game used to cross-check the grid solvers: backward
// induction with multilinear interpolation at the forward-advected point,
// deliberately sharing no numerics with the Lax-Friedrichs path.
struct DiscreteGame {
  int dim = 0;
  std::vector<Control> defender_set;  // empty when the model has no defender
  std::vector<Control> attacker_set;
  int defender_sign = 0;  // +1 maximizes the value, -1 minimizes
  int attacker_sign = 0;
  std::function<void(std::span<const double>, const Control&, const Control&,
                     std::span<double>)>
      flow;
};

enum class OracleMode { Reach, MaxTracking };

// Reach:       V <- min(l, opt_D opt_A V(x + dt*f))
// MaxTracking: V <- max(l, opt_D opt_A V(x + dt*f))
ScalarField oracle_run(const DiscreteGame& game, const ScalarField& l,
                       const OracleConfig& cfg, OracleMode mode);

DiscreteGame discretize_model(const DynamicsModel& model,
                              const OracleConfig& cfg);

ScalarField oracle_solve_reach(const DynamicsModel& model, const ScalarField& l,
                               const OracleConfig& cfg);
ScalarField oracle_solve_max_tracking(const DynamicsModel& model,
                                      const ScalarField& l,
                                      const OracleConfig& cfg);

// Max over A's zero-level boundary cells of the distance to B's nearest
// boundary cell (and vice versa); the set-agreement metric for solver diffs.
double boundary_displacement(const ScalarField& a, const ScalarField& b,
                             double level = 0.0);

}  // namespace hjra
