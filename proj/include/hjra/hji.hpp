#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hjra/dynamics.hpp"
#include "hjra/grid.hpp"

namespace hjra {

struct SolveConfig {
  double horizon = 10.0;      // seconds of backward horizon to march
  double cfl = 0.8;           // in (0, 1]
  double tolerance = 1e-3;    // sup-norm change per unit time
  bool stop_on_convergence = true;
  std::size_t max_iterations = 4000000;
  double snapshot_dt = 0.0;   // 0 = no snapshots
  bool extract_crossing_time = false;  // needs snapshot_dt > 0
  bool log_progress = false;
  std::size_t log_every = 200;
  // Called at horizon 0 and at every snapshot cadence with the current field.
  std::function<void(double, const ScalarField&)> on_snapshot;
};

// Earliest-crossing times per node; +inf where the value never reaches zero.
struct TimeField {
  GridSpec spec;
  std::vector<double> times;
  static constexpr double kNever = std::numeric_limits<double>::infinity();
};

struct ValueSolution {
  ScalarField field;
  bool converged = false;
  double final_horizon = 0.0;
  std::vector<double> sup_change_history;  // per-iteration sup-change per unit time
  std::optional<TimeField> crossing_time;
};

// dt = cfl / sum_i(alpha_i / dx_i).
double cfl_timestep(std::span<const double> alpha,
                    std::span<const double> spacing, double cfl);

// Reach-avoid variational inequality: Phi init = max(l, g); each step
// Phi <- max(min(Phi + dt*H_num, l), g), where H_num is the Lax-Friedrichs
// numerical Hamiltonian with per-axis dissipation bounds from the model.
ValueSolution solve_reach_avoid(const DynamicsModel& model, const ScalarField& l,
                                const ScalarField& g, const SolveConfig& cfg);

// Plain reach: the g-clamp removed, Phi init = l, Phi <- min(Phi + dt*H_num, l).
ValueSolution solve_reach(const DynamicsModel& model, const ScalarField& l,
                          const SolveConfig& cfg);

// Maximum-tracking-cost solve over a growing time window: V init = l (l >= 0
// required), V <- max(V + dt*H_num, l), then frozen monotone non-decreasing
// via max with the previous iterate.
ValueSolution solve_max_tracking(const DynamicsModel& model, const ScalarField& l,
                                 const SolveConfig& cfg);

// Earliest horizon at which each node's value becomes non-positive, linearly
// interpolated between the bracketing snapshots; +inf where it never does.
// Snapshots must be at strictly increasing horizons starting at 0.
TimeField extract_time_field(
    const std::vector<std::pair<double, const ScalarField*>>& snapshots);

// Streaming form of extract_time_field used inside the solvers.
class CrossingTimeAccumulator {
 public:
  explicit CrossingTimeAccumulator(const GridSpec& spec);
  void add(double horizon, const ScalarField& field);
  TimeField take();

 private:
  TimeField out_;
  std::vector<double> prev_values_;
  double prev_horizon_ = -1.0;
  bool first_ = true;
};

}  // namespace hjra
