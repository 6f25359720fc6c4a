#include "hjra/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hjra/hji.hpp"
#include "hjra/parallel.hpp"

namespace hjra {

namespace {

std::vector<Control> disk_controls(double bound, int angles) {
  std::vector<Control> out;
  out.reserve(angles);
  for (int i = 0; i < angles; ++i) {
    const double th = 2.0 * std::numbers::pi * i / angles;
    out.push_back(Control{{bound * std::cos(th), bound * std::sin(th)}, 2});
  }
  return out;
}

std::vector<Control> interval_controls(double bound, int points) {
  std::vector<Control> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double u = -bound + 2.0 * bound * i / (points - 1);
    out.push_back(Control{{u, 0.0}, 1});
  }
  return out;
}

double opt_over_attacker(const DiscreteGame& game, std::span<const double> x,
                         const Control& u_d, double dt,
                         const ScalarField& value) {
  double best = game.attacker_sign > 0 ? -1e300 : 1e300;
  std::array<double, kMaxDim> f{}, adv{};
  for (const Control& u_a : game.attacker_set) {
    game.flow(x, u_d, u_a, std::span<double>(f.data(), game.dim));
    for (int a = 0; a < game.dim; ++a) adv[a] = x[a] + dt * f[a];
    const double v = interpolate_linear_extend(
        value, std::span<const double>(adv.data(), game.dim));
    if (game.attacker_sign > 0 ? v > best : v < best) best = v;
  }
  return best;
}

}  // namespace

ScalarField oracle_run(const DiscreteGame& game, const ScalarField& l,
                       const OracleConfig& cfg, OracleMode mode) {
  const GridSpec& spec = l.spec;
  if (spec.ndim() != game.dim)
    throw std::invalid_argument("oracle: grid arity mismatch");
  if (spec.numel() > cfg.node_cap)
    throw std::invalid_argument("oracle: node cap exceeded");
  if (game.attacker_set.empty())
    throw std::invalid_argument("oracle: attacker control set empty");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("oracle: dt must be set");

  ScalarField cur = l;
  ScalarField next(spec);
  const int d = game.dim;
  const std::size_t iters =
      static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));

  for (std::size_t k = 0; k < iters; ++k) {
    double sup = 0.0;
    std::vector<double> partial(std::max(1, num_threads()), 0.0);
    const std::size_t total = spec.numel();
    const std::size_t chunk =
        (total + partial.size() - 1) / partial.size();
    parallel_chunks(total, [&](std::size_t begin, std::size_t end) {
      std::array<int, kMaxDim> idx{};
      std::array<double, kMaxDim> x{};
      spec.unflatten(begin, std::span<int>(idx.data(), d));
      double local = 0.0;
      for (std::size_t n = begin; n < end; ++n) {
        for (int a = 0; a < d; ++a) x[a] = spec.coord(a, idx[a]);
        double opt;
        if (game.defender_set.empty()) {
          opt = opt_over_attacker(game, std::span<const double>(x.data(), d),
                                  Control{}, cfg.dt, cur);
        } else {
          opt = game.defender_sign > 0 ? -1e300 : 1e300;
          for (const Control& u_d : game.defender_set) {
            const double inner =
                opt_over_attacker(game, std::span<const double>(x.data(), d),
                                  u_d, cfg.dt, cur);
            if (game.defender_sign > 0 ? inner > opt : inner < opt) opt = inner;
          }
        }
        const double v = mode == OracleMode::Reach ? std::min(l.values[n], opt)
                                                   : std::max(l.values[n], opt);
        next.values[n] = v;
        local = std::max(local, std::abs(v - cur.values[n]));
        for (int a = d - 1; a >= 0; --a) {
          if (++idx[a] < spec.axis(a).count) break;
          idx[a] = 0;
        }
      }
      partial[begin / chunk] = std::max(partial[begin / chunk], local);
    });
    for (double p : partial) sup = std::max(sup, p);
    std::swap(cur.values, next.values);
    if (cfg.stop_on_convergence && sup / cfg.dt <= cfg.tolerance) break;
  }
  return cur;
}

DiscreteGame discretize_model(const DynamicsModel& model,
                              const OracleConfig& cfg) {
  DiscreteGame game;
  game.dim = model.state_dim();
  game.defender_sign = model.role_sign(Player::Defender);
  game.attacker_sign = model.role_sign(Player::Attacker);
  if (model.control_dim(Player::Defender) == 2)
    game.defender_set = disk_controls(model.control_bound(Player::Defender),
                                      cfg.disk_angles);
  else if (model.control_dim(Player::Defender) == 1)
    game.defender_set = interval_controls(
        model.control_bound(Player::Defender), cfg.interval_points);
  if (model.control_dim(Player::Attacker) == 2)
    game.attacker_set = disk_controls(model.control_bound(Player::Attacker),
                                      cfg.disk_angles);
  else
    game.attacker_set = interval_controls(
        model.control_bound(Player::Attacker), cfg.interval_points);
  game.flow = [model](std::span<const double> x, const Control& ud,
                      const Control& ua, std::span<double> out) {
    model.flow(x, ud, ua, out);
  };
  return game;
}

namespace {

OracleConfig with_default_dt(const DynamicsModel& model, const ScalarField& l,
                             const OracleConfig& cfg) {
  OracleConfig c = cfg;
  if (c.dt <= 0.0) {
    const auto alpha = model.dissipation_bounds(l.spec);
    std::vector<double> spacing(l.spec.ndim());
    for (int a = 0; a < l.spec.ndim(); ++a)
      spacing[a] = l.spec.axis(a).spacing;
    c.dt = 0.5 * cfl_timestep(alpha, spacing, 0.8);
  }
  return c;
}

}  // namespace

ScalarField oracle_solve_reach(const DynamicsModel& model, const ScalarField& l,
                               const OracleConfig& cfg) {
  const OracleConfig c = with_default_dt(model, l, cfg);
  return oracle_run(discretize_model(model, c), l, c, OracleMode::Reach);
}

ScalarField oracle_solve_max_tracking(const DynamicsModel& model,
                                      const ScalarField& l,
                                      const OracleConfig& cfg) {
  const OracleConfig c = with_default_dt(model, l, cfg);
  return oracle_run(discretize_model(model, c), l, c, OracleMode::MaxTracking);
}

double boundary_displacement(const ScalarField& a, const ScalarField& b,
                             double level) {
  if (a.spec.ndim() != b.spec.ndim())
    throw std::invalid_argument("boundary_displacement: dimension mismatch");
  const int d = a.spec.ndim();

  // Boundary node coordinates: sign of (value - level) differs from an
  // axis neighbor. Coordinates (not indices), so grids may differ.
  auto collect = [&](const ScalarField& f) {
    const GridSpec& spec = f.spec;
    std::vector<std::array<double, kMaxDim>> nodes;
    std::array<int, kMaxDim> idx{};
    for (std::size_t n = 0; n < spec.numel(); ++n) {
      spec.unflatten(n, std::span<int>(idx.data(), d));
      const bool in = f.values[n] <= level;
      for (int ax = 0; ax < d; ++ax) {
        if (idx[ax] + 1 >= spec.axis(ax).count) continue;
        const bool nin = f.values[n + spec.stride(ax)] <= level;
        if (in != nin) {
          std::array<double, kMaxDim> x{};
          for (int c = 0; c < d; ++c) x[c] = spec.coord(c, idx[c]);
          nodes.push_back(x);
          break;
        }
      }
    }
    return nodes;
  };
  const auto na = collect(a);
  const auto nb = collect(b);
  if (na.empty() && nb.empty()) return 0.0;
  if (na.empty() || nb.empty())
    return std::numeric_limits<double>::infinity();

  auto one_sided = [&](const std::vector<std::array<double, kMaxDim>>& from,
                       const std::vector<std::array<double, kMaxDim>>& to) {
    double worst = 0.0;
    for (const auto& xf : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& xt : to) {
        double dd = 0.0;
        for (int ax = 0; ax < d; ++ax)
          dd += (xf[ax] - xt[ax]) * (xf[ax] - xt[ax]);
        best = std::min(best, dd);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(na, nb), one_sided(nb, na));
}

}  // namespace hjra
