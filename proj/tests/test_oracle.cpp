#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hjra/oracle.hpp"

using namespace hjra;

namespace {

Scenario paper_params() {
  Scenario s;
  s.target = ImplicitSet::halfspace({1.0, 0.0}, 3.0);
  return s;
}

// 1D pure pursuit: single integrators, pursuer speed 4, evader speed 2,
// capture radius 1 on the relative gap. Used to validate the oracle itself;
// the game value crosses zero at gap/closing-speed exactly.
DiscreteGame pure_pursuit_1d(int interval_points) {
  DiscreteGame game;
  game.dim = 1;
  game.defender_sign = -1;  // pursuer shrinks the gap value
  game.attacker_sign = +1;
  auto interval = [&](double bound) {
    std::vector<Control> set;
    for (int i = 0; i < interval_points; ++i)
      set.push_back(Control{
          {-bound + 2.0 * bound * i / (interval_points - 1), 0.0}, 1});
    return set;
  };
  game.defender_set = interval(4.0);
  game.attacker_set = interval(2.0);
  game.flow = [](std::span<const double>, const Control& ud, const Control& ua,
                 std::span<double> out) { out[0] = ua.u[0] - ud.u[0]; };
  return game;
}

ScalarField gap_cost(const GridSpec& g) {
  return sample_field(
      g, [](std::span<const double> x) { return std::abs(x[0]) - 1.0; });
}

}  // namespace

TEST_CASE("horizon zero returns l unchanged") {
  auto m = DynamicsModel::from_scenario(ModelId::RelVertical2D, paper_params());
  GridSpec g({21, 15}, {-5, -4}, {5, 4});
  auto l = sample_field(
      g, [](std::span<const double> x) { return std::abs(x[0]); });
  OracleConfig cfg;
  cfg.horizon = 0.0;
  cfg.dt = 0.05;
  const auto v = oracle_solve_max_tracking(m, l, cfg);
  CHECK(v.values == l.values);
}

TEST_CASE("1D pure pursuit crossing time validates the oracle") {
  GridSpec g({161}, {-8.0}, {8.0});  // cell 0.1
  const auto l = gap_cost(g);
  OracleConfig cfg;
  cfg.dt = 0.05;
  cfg.stop_on_convergence = false;
  const double tol = cfg.dt + 0.1;  // dt + one cell

  // analytic crossing at gap 5: (5 - 1) / (4 - 2) = 2.0 s
  const double probe[1] = {5.0};
  cfg.horizon = 2.0 - tol;
  const auto before =
      oracle_run(pure_pursuit_1d(11), l, cfg, OracleMode::Reach);
  CHECK(interpolate(before, probe) > 0.0);

  cfg.horizon = 2.0 + tol;
  const auto after = oracle_run(pure_pursuit_1d(11), l, cfg, OracleMode::Reach);
  CHECK(interpolate(after, probe) <= 0.0);
}

TEST_CASE("max-tracking window grows monotonically") {
  auto m = DynamicsModel::from_scenario(ModelId::RelVertical2D, paper_params());
  GridSpec g({41, 21}, {-6, -4}, {6, 4});
  auto l = sample_field(
      g, [](std::span<const double> x) { return std::abs(x[0]); });
  OracleConfig cfg;
  cfg.dt = 0.05;
  cfg.stop_on_convergence = false;

  cfg.horizon = 0.5;
  const auto v1 = oracle_solve_max_tracking(m, l, cfg);
  cfg.horizon = 1.5;
  const auto v2 = oracle_solve_max_tracking(m, l, cfg);
  for (std::size_t n = 0; n < g.numel(); ++n) {
    CHECK(v1.values[n] >= l.values[n] - 1e-12);
    CHECK(v2.values[n] >= v1.values[n] - 1e-12);
  }
}

TEST_CASE("refining one player's control set tightens its value") {
  GridSpec g({81}, {-8.0}, {8.0});
  const auto l = gap_cost(g);
  OracleConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 1.5;
  cfg.stop_on_convergence = false;

  // pursuer minimizes: a superset of pursuer controls can only lower V
  auto coarse = pure_pursuit_1d(6);
  auto fine = coarse;  // superset: coarse points plus their midpoints
  for (std::size_t i = 1; i < coarse.defender_set.size(); ++i) {
    Control mid;
    mid.dim = 1;
    mid.u[0] =
        0.5 * (coarse.defender_set[i - 1].u[0] + coarse.defender_set[i].u[0]);
    fine.defender_set.push_back(mid);
  }
  const auto v_coarse = oracle_run(coarse, l, cfg, OracleMode::Reach);
  const auto v_fine = oracle_run(fine, l, cfg, OracleMode::Reach);
  for (std::size_t n = 0; n < g.numel(); ++n)
    CHECK(v_fine.values[n] <= v_coarse.values[n] + 1e-12);

  // evader maximizes: refining the evader set can only raise V
  auto fine_a = coarse;
  fine_a.attacker_set = coarse.attacker_set;
  for (std::size_t i = 1; i < coarse.attacker_set.size(); ++i) {
    Control mid;
    mid.dim = 1;
    mid.u[0] =
        0.5 * (coarse.attacker_set[i - 1].u[0] + coarse.attacker_set[i].u[0]);
    fine_a.attacker_set.push_back(mid);
  }
  const auto v_fine_a = oracle_run(fine_a, l, cfg, OracleMode::Reach);
  for (std::size_t n = 0; n < g.numel(); ++n)
    CHECK(v_fine_a.values[n] >= v_coarse.values[n] - 1e-12);
}

TEST_CASE("node cap guards against oversized grids") {
  auto m = DynamicsModel::from_scenario(ModelId::RelVertical2D, paper_params());
  GridSpec g({601, 401}, {-10, -4}, {10, 4});
  auto l = sample_field(
      g, [](std::span<const double> x) { return std::abs(x[0]); });
  OracleConfig cfg;
  cfg.dt = 0.05;
  CHECK_THROWS(oracle_solve_max_tracking(m, l, cfg));
}
