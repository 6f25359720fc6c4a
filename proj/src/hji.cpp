#include "hjra/hji.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hjra/parallel.hpp"

namespace hjra {

double cfl_timestep(std::span<const double> alpha,
                    std::span<const double> spacing, double cfl) {
  if (alpha.size() != spacing.size())
    throw std::invalid_argument("cfl_timestep: arity mismatch");
  if (!(cfl > 0.0) || cfl > 1.0)
    throw std::invalid_argument("cfl_timestep: cfl must be in (0, 1]");
  double denom = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(spacing[i] > 0.0))
      throw std::invalid_argument("cfl_timestep: zero spacing");
    denom += alpha[i] / spacing[i];
  }
  const double dt = cfl / denom;
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("cfl_timestep: non-positive step");
  return dt;
}

namespace {

enum class StepMode { ReachAvoid, Reach, MaxTracking };

struct SweepCtx {
  const double* prev = nullptr;
  double* next = nullptr;
  const double* base = nullptr;  // start-of-step field for the RK2 average
  const double* l = nullptr;
  const double* g = nullptr;
  double dt = 0.0;
  bool average = false;  // second Heun stage: next = (base + stage)/2
  const DynamicsModel* model = nullptr;
  std::array<double, kMaxDim> inv_h{};
  std::array<const double*, kMaxDim> coord_table{};
  std::array<std::size_t, kMaxDim> stride{};
  std::array<int, kMaxDim> count{};
  const GridSpec* spec = nullptr;
};

struct ChunkResult {
  double max_change = 0.0;
  bool nonfinite = false;
};

// Weighted blend of the two second-order one-sided stencils (HJ-WENO3).
// v1, v2, v3 are consecutive first differences ordered away from the node;
// the derivative sought lies between v2 and v3's stencils.
inline double weno3(double v1, double v2, double v3) {
  const double s1 = (v2 - v1) * (v2 - v1);
  const double s2 = (v3 - v2) * (v3 - v2);
  const double eps = 1e-6 * std::max({v1 * v1, v2 * v2, v3 * v3}) + 1e-99;
  const double a1 = (1.0 / 3.0) / ((eps + s1) * (eps + s1));
  const double a2 = (2.0 / 3.0) / ((eps + s2) * (eps + s2));
  const double w1 = a1 / (a1 + a2);
  return w1 * (1.5 * v2 - 0.5 * v1) + (1.0 - w1) * 0.5 * (v2 + v3);
}

// One Jacobi sweep over [begin, end), marching the value in horizon with the
// per-term upwind numerical Hamiltonian. One-sided derivatives are WENO3:
// smooth-weighted blends of the second-order stencils. The curvature
// correction cancels the one-sided bias of plain upwind differences in
// smooth regions (which otherwise inflates stationary solves by a
// dissipation-sized offset), and the smooth weights avoid the hard
// first-order fallback at curvature sign changes that keeps valley floors
// creeping. Boundary stencils use linearly extrapolated ghosts.
template <int NDIM, ModelId ID, StepMode MODE>
ChunkResult sweep_chunk(const SweepCtx& ctx, std::size_t begin, std::size_t end) {
  ChunkResult res;
  std::array<int, kMaxDim> idx{};
  std::array<double, kMaxDim> coords{};
  ctx.spec->unflatten(begin, std::span<int>(idx.data(), NDIM));
  for (int a = 0; a < NDIM; ++a) coords[a] = ctx.coord_table[a][idx[a]];

  const double dt = ctx.dt;
  const double* prev = ctx.prev;
  double dmv[NDIM], dpv[NDIM];

  for (std::size_t n = begin; n < end; ++n) {
    const double c = prev[n];
    for (int a = 0; a < NDIM; ++a) {
      const std::size_t s = ctx.stride[a];
      const int i = idx[a];
      const int count = ctx.count[a];
      // linear ghost extension: value(k steps outside) keeps the edge slope
      const double m1 = (i > 0) ? prev[n - s] : 2.0 * c - prev[n + s];
      const double p1 = (i < count - 1) ? prev[n + s] : 2.0 * c - prev[n - s];
      const double m2 = (i > 1) ? prev[n - 2 * s] : 2.0 * m1 - c;
      const double p2 = (i < count - 2) ? prev[n + 2 * s] : 2.0 * p1 - c;

      const double dm1 = (m1 - m2) * ctx.inv_h[a];
      const double d0 = (c - m1) * ctx.inv_h[a];
      const double dp1 = (p1 - c) * ctx.inv_h[a];
      const double dp2 = (p2 - p1) * ctx.inv_h[a];
      dmv[a] = weno3(dm1, d0, dp1);
      dpv[a] = weno3(dp2, dp1, d0);
    }
    const double ham =
        detail::numerical_hamiltonian(ID, *ctx.model, coords.data(), dmv, dpv);
    const double cand = c + dt * ham;

    double v;
    if constexpr (MODE == StepMode::ReachAvoid) {
      v = std::max(std::min(cand, ctx.l[n]), ctx.g[n]);
    } else if constexpr (MODE == StepMode::Reach) {
      v = std::min(cand, ctx.l[n]);
    } else {
      v = std::max(cand, ctx.l[n]);
    }
    double ref = c;
    if (ctx.average) {
      // Second Heun stage: average with the start-of-step field, re-clamp,
      // then freeze toward the exact object's horizon monotonicity: reach
      // values only shrink as the horizon grows, the tracking max-window
      // value only grows. The freeze also pins the WENO wobble so the
      // sup-change convergence flag can settle.
      ref = ctx.base[n];
      v = 0.5 * (ref + v);
      if constexpr (MODE == StepMode::ReachAvoid) {
        v = std::max(std::min(std::min(v, ref), ctx.l[n]), ctx.g[n]);
      } else if constexpr (MODE == StepMode::Reach) {
        v = std::min(std::min(v, ref), ctx.l[n]);
      } else {
        v = std::max(std::max(v, ctx.l[n]), ref);
      }
    }
    ctx.next[n] = v;

    const double change = std::abs(v - ref);
    if (change > res.max_change) res.max_change = change;
    if (!std::isfinite(v)) res.nonfinite = true;

    for (int a = NDIM - 1; a >= 0; --a) {
      if (++idx[a] < ctx.count[a]) {
        coords[a] = ctx.coord_table[a][idx[a]];
        break;
      }
      idx[a] = 0;
      coords[a] = ctx.coord_table[a][0];
    }
  }
  return res;
}

using SweepFn = ChunkResult (*)(const SweepCtx&, std::size_t, std::size_t);

template <StepMode MODE>
SweepFn pick_sweep(ModelId id) {
  switch (id) {
    case ModelId::HorizontalGame6D:
      return &sweep_chunk<6, ModelId::HorizontalGame6D, MODE>;
    case ModelId::VerticalGame3D:
      return &sweep_chunk<3, ModelId::VerticalGame3D, MODE>;
    case ModelId::RelVertical2D:
      return &sweep_chunk<2, ModelId::RelVertical2D, MODE>;
    case ModelId::RelHorizontal4D:
      return &sweep_chunk<4, ModelId::RelHorizontal4D, MODE>;
    case ModelId::AttackerReach2D:
      return &sweep_chunk<2, ModelId::AttackerReach2D, MODE>;
  }
  throw std::logic_error("pick_sweep: bad model");
}

SweepFn pick_sweep(ModelId id, StepMode mode) {
  switch (mode) {
    case StepMode::ReachAvoid: return pick_sweep<StepMode::ReachAvoid>(id);
    case StepMode::Reach: return pick_sweep<StepMode::Reach>(id);
    case StepMode::MaxTracking: return pick_sweep<StepMode::MaxTracking>(id);
  }
  throw std::logic_error("pick_sweep: bad mode");
}

ValueSolution solve_common(const DynamicsModel& model, const ScalarField& l,
                           const ScalarField* g, StepMode mode,
                           const SolveConfig& cfg) {
  const GridSpec& spec = l.spec;
  if (spec.ndim() != model.state_dim())
    throw std::invalid_argument("solve: grid arity does not match model");
  if (g && !(g->spec == spec))
    throw std::invalid_argument("solve: l and g grids differ");
  if (mode == StepMode::MaxTracking) {
    for (double v : l.values)
      if (v < 0.0)
        throw std::invalid_argument("solve_max_tracking: l must be >= 0");
  }
  if (cfg.extract_crossing_time && !(cfg.snapshot_dt > 0.0))
    throw std::invalid_argument("solve: crossing time needs snapshot_dt > 0");

  const int d = spec.ndim();
  const auto alpha = model.dissipation_bounds(spec);
  std::vector<double> spacing(d);
  for (int a = 0; a < d; ++a) spacing[a] = spec.axis(a).spacing;
  const double dt_cfl = cfl_timestep(alpha, spacing, cfg.cfl);

  // Coordinate lookup tables per axis.
  std::vector<std::vector<double>> tables(d);
  SweepCtx ctx;
  for (int a = 0; a < d; ++a) {
    tables[a].resize(spec.axis(a).count);
    for (int i = 0; i < spec.axis(a).count; ++i) tables[a][i] = spec.coord(a, i);
    ctx.coord_table[a] = tables[a].data();
    ctx.inv_h[a] = 1.0 / spec.axis(a).spacing;
    ctx.stride[a] = spec.stride(a);
    ctx.count[a] = spec.axis(a).count;
  }
  ctx.model = &model;
  ctx.spec = &spec;
  ctx.l = l.values.data();
  ctx.g = g ? g->values.data() : nullptr;

  // Terminal condition at horizon zero.
  ScalarField cur(spec);
  if (mode == StepMode::ReachAvoid) {
    for (std::size_t n = 0; n < cur.values.size(); ++n)
      cur.values[n] = std::max(l.values[n], g->values[n]);
  } else {
    cur.values = l.values;
  }
  ScalarField buf(spec);

  std::optional<CrossingTimeAccumulator> crossing;
  if (cfg.extract_crossing_time) crossing.emplace(spec);
  double next_snap = cfg.snapshot_dt > 0.0 ? cfg.snapshot_dt : -1.0;
  if (cfg.snapshot_dt > 0.0) {
    if (cfg.on_snapshot) cfg.on_snapshot(0.0, cur);
    if (crossing) crossing->add(0.0, cur);
  }

  const SweepFn sweep = pick_sweep(model.id, mode);
  const int nthreads = std::max(1, num_threads());

  ValueSolution sol;
  double horizon = 0.0;
  std::size_t iter = 0;
  bool converged = false;
  const auto t0 = std::chrono::steady_clock::now();

  while (horizon < cfg.horizon - 1e-12 && iter < cfg.max_iterations) {
    double dt = dt_cfl;
    bool land_snap = false, land_end = false;
    if (next_snap > 0.0 && horizon + dt >= next_snap - 1e-12) {
      dt = next_snap - horizon;
      land_snap = true;
    }
    if (horizon + dt >= cfg.horizon - 1e-12 && cfg.horizon - horizon <= dt) {
      dt = cfg.horizon - horizon;
      land_end = true;
      land_snap = land_snap && std::abs(next_snap - cfg.horizon) < 1e-9;
    }
    ctx.dt = dt;
    const std::size_t total = spec.numel();
    const std::size_t chunk = (total + nthreads - 1) / nthreads;
    std::vector<ChunkResult> partials(nthreads);
    auto run_sweep = [&] {
      parallel_chunks(total, [&](std::size_t begin, std::size_t end) {
        const std::size_t slot = begin / chunk;
        partials[slot] = sweep(ctx, begin, end);
      });
    };

    // Heun (TVD-RK2) step: a full Euler stage into the scratch buffer, then
    // an averaged second stage written back over the current field. The
    // average turns two-cycles of the Euler map into fixed points, which the
    // sup-change convergence flag needs.
    ctx.average = false;
    ctx.base = nullptr;
    ctx.prev = cur.values.data();
    ctx.next = buf.values.data();
    run_sweep();
    bool bad = false;
    for (const auto& p : partials) bad = bad || p.nonfinite;

    ctx.average = true;
    ctx.base = cur.values.data();
    ctx.prev = buf.values.data();
    ctx.next = cur.values.data();
    run_sweep();
    double sup = 0.0;
    for (const auto& p : partials) {
      sup = std::max(sup, p.max_change);
      bad = bad || p.nonfinite;
    }
    horizon = land_end ? cfg.horizon : (land_snap ? next_snap : horizon + dt);
    ++iter;

    if (bad) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "solver produced non-finite values (iter %zu, horizon %.4f)",
                    iter, horizon);
      throw std::runtime_error(msg);
    }

    const double rate = sup / dt;
    sol.sup_change_history.push_back(rate);

    if (land_snap) {
      if (cfg.on_snapshot) cfg.on_snapshot(horizon, cur);
      if (crossing) crossing->add(horizon, cur);
      next_snap += cfg.snapshot_dt;
    }
    if (cfg.log_progress && (iter % cfg.log_every == 0 || land_end)) {
      const double wall =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();
      std::fprintf(stderr,
                   "{\"iter\":%zu,\"horizon\":%.6f,\"sup_change\":%.6e,"
                   "\"wall_ms\":%.1f}\n",
                   iter, horizon, rate, wall);
    }
    if (rate <= cfg.tolerance) {
      converged = true;
      if (cfg.stop_on_convergence) break;
    }
  }

  sol.field = std::move(cur);
  sol.converged = converged;
  sol.final_horizon = horizon;
  if (crossing) sol.crossing_time = crossing->take();
  return sol;
}

}  // namespace

ValueSolution solve_reach_avoid(const DynamicsModel& model, const ScalarField& l,
                                const ScalarField& g, const SolveConfig& cfg) {
  return solve_common(model, l, &g, StepMode::ReachAvoid, cfg);
}

ValueSolution solve_reach(const DynamicsModel& model, const ScalarField& l,
                          const SolveConfig& cfg) {
  return solve_common(model, l, nullptr, StepMode::Reach, cfg);
}

ValueSolution solve_max_tracking(const DynamicsModel& model, const ScalarField& l,
                                 const SolveConfig& cfg) {
  return solve_common(model, l, nullptr, StepMode::MaxTracking, cfg);
}

CrossingTimeAccumulator::CrossingTimeAccumulator(const GridSpec& spec) {
  out_.spec = spec;
  out_.times.assign(spec.numel(), TimeField::kNever);
}

void CrossingTimeAccumulator::add(double horizon, const ScalarField& field) {
  if (!(field.spec == out_.spec))
    throw std::invalid_argument("crossing time: grid mismatch");
  if (first_) {
    if (horizon != 0.0)
      throw std::invalid_argument("crossing time: snapshots must start at 0");
    for (std::size_t n = 0; n < field.values.size(); ++n)
      if (field.values[n] <= 0.0) out_.times[n] = 0.0;
    prev_values_ = field.values;
    prev_horizon_ = horizon;
    first_ = false;
    return;
  }
  if (horizon <= prev_horizon_)
    throw std::invalid_argument("crossing time: unordered snapshots");
  parallel_chunks(field.values.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      if (out_.times[n] != TimeField::kNever) continue;
      const double v = field.values[n];
      if (v > 0.0) continue;
      const double pv = prev_values_[n];
      // pv > 0 here (otherwise the node would have been marked already)
      const double frac = pv / (pv - v);
      out_.times[n] = prev_horizon_ + frac * (horizon - prev_horizon_);
    }
  });
  prev_values_ = field.values;
  prev_horizon_ = horizon;
}

TimeField CrossingTimeAccumulator::take() { return std::move(out_); }

TimeField extract_time_field(
    const std::vector<std::pair<double, const ScalarField*>>& snapshots) {
  if (snapshots.empty())
    throw std::invalid_argument("extract_time_field: no snapshots");
  CrossingTimeAccumulator acc(snapshots.front().second->spec);
  for (const auto& [h, f] : snapshots) acc.add(h, *f);
  return acc.take();
}

}  // namespace hjra
