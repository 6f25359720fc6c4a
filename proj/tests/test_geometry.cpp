#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hjra/geometry.hpp"

using namespace hjra;

namespace {

Scenario reference_scenario() {
  Scenario s;
  s.target = ImplicitSet::halfspace({1.0, 0.0}, 3.0);  // x <= 3
  s.obstacles.push_back(ImplicitSet::circle(20.0, 16.0, 3.0));
  s.obstacles.push_back(ImplicitSet::box({27.0, 4.0}, {33.0, 10.0}));
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("signed distance primitives") {
  SUBCASE("halfspace x <= 3") {
    auto hs = ImplicitSet::halfspace({1.0, 0.0}, 3.0);
    CHECK(eval_signed(hs, std::vector<double>{5.0, 0.0}) == doctest::Approx(2.0));
    CHECK(eval_signed(hs, std::vector<double>{3.0, 7.0}) == doctest::Approx(0.0));
    CHECK(eval_signed(hs, std::vector<double>{1.0, -2.0}) ==
          doctest::Approx(-2.0));
  }
  SUBCASE("union of disjoint circles picks the nearer boundary") {
    auto a = ImplicitSet::circle(0.0, 0.0, 1.0);
    auto b = ImplicitSet::circle(10.0, 0.0, 1.0);
    auto u = ImplicitSet::set_union({a, b});
    // 4 m from A's boundary, 1 m from B's boundary (at x=8)
    CHECK(eval_signed(u, std::vector<double>{8.0, 0.0}) == doctest::Approx(1.0));
  }
  SUBCASE("sphere center depth") {
    auto s = ImplicitSet::sphere(0, 0, 0, 2.0);
    CHECK(eval_signed(s, std::vector<double>{0.0, 0.0, 0.0}) ==
          doctest::Approx(-2.0));
  }
  SUBCASE("box exact signed distance") {
    auto b = ImplicitSet::box({0.0, 0.0}, {2.0, 2.0});
    CHECK(eval_signed(b, std::vector<double>{3.0, 1.0}) == doctest::Approx(1.0));
    CHECK(eval_signed(b, std::vector<double>{3.0, 3.0}) ==
          doctest::Approx(std::sqrt(2.0)));
    CHECK(eval_signed(b, std::vector<double>{1.0, 1.0}) == doctest::Approx(-1.0));
  }
  SUBCASE("cylinder ignores z") {
    auto c = ImplicitSet::cylinder(0.0, 0.0, 1.0);
    CHECK(eval_signed(c, std::vector<double>{2.0, 0.0, 55.0}) ==
          doctest::Approx(1.0));
  }
  SUBCASE("arity mismatch throws") {
    auto c = ImplicitSet::circle(0, 0, 1);
    CHECK_THROWS(eval_signed(c, std::vector<double>{1.0, 2.0, 3.0}));
  }
}

TEST_CASE("eval_signed is 1-Lipschitz for primitives") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<ImplicitSet> prims;
  prims.push_back(ImplicitSet::halfspace({1.0, 2.0}, 1.5));
  prims.push_back(ImplicitSet::box({-1.0, -2.0}, {3.0, 1.0}));
  prims.push_back(ImplicitSet::circle(1.0, -1.0, 2.5));
  for (const auto& p : prims) {
    for (int k = 0; k < 500; ++k) {
      const double a[2] = {u(rng), u(rng)};
      const double b[2] = {u(rng), u(rng)};
      const double lhs = std::abs(eval_signed(p, a) - eval_signed(p, b));
      const double rhs = std::hypot(a[0] - b[0], a[1] - b[1]);
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("De Morgan: complement(union) == intersection(complements)") {
  auto a = ImplicitSet::circle(0.0, 0.0, 2.0);
  auto b = ImplicitSet::box({-1.0, -1.0}, {4.0, 2.0});
  auto lhs = ImplicitSet::complement(ImplicitSet::set_union({a, b}));
  auto rhs = ImplicitSet::set_intersection(
      {ImplicitSet::complement(a), ImplicitSet::complement(b)});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int k = 0; k < 500; ++k) {
    const double p[2] = {u(rng), u(rng)};
    CHECK(eval_signed(lhs, p) == eval_signed(rhs, p));
  }
}

TEST_CASE("set-expr JSON round trip") {
  auto set = ImplicitSet::set_union(
      {ImplicitSet::circle(1, 2, 3),
       ImplicitSet::complement(ImplicitSet::box({0, 0}, {1, 1}))});
  auto back = ImplicitSet::from_json(set.to_json());
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const double p[2] = {u(rng), u(rng)};
    CHECK(eval_signed(set, p) == eval_signed(back, p));
  }
}

TEST_CASE("scenario JSON, validation and hash") {
  Scenario s = reference_scenario();
  s.domains["attacker_reach"] = DomainBox{{46, 26}, {0, 0}, {45, 25}};
  const std::string text = s.to_json();
  Scenario back = Scenario::from_json(text);
  CHECK(back.d_h == s.d_h);
  CHECK(back.hash() == s.hash());
  CHECK(back.domains.count("attacker_reach") == 1);

  Scenario bad = reference_scenario();
  bad.d_z = -1.0;
  CHECK_THROWS(bad.validate());
  Scenario bad_k = reference_scenario();
  bad_k.obstacle_penalty = 1.0;  // must exceed d_h
  CHECK_THROWS(bad_k.validate());

  // hash changes when any parameter changes
  Scenario other = reference_scenario();
  other.u_z_d = 5.0;
  CHECK(other.hash() != s.hash());
}

TEST_CASE("horizontal cost fields") {
  Scenario s = reference_scenario();
  GridSpec grid6({7, 5, 3, 3, 7, 5}, {0, 0, -6, -6, 0, 0},
                 {45, 25, 6, 6, 45, 25});

  SUBCASE("classic variant sign conventions") {
    auto costs =
        build_horizontal_costs(s, grid6, CaptureVariant::Classic, nullptr);
    CHECK(costs.l.all_finite());
    CHECK(costs.g.all_finite());
    int idx[6];
    for (std::size_t n = 0; n < grid6.numel(); ++n) {
      grid6.unflatten(n, idx);
      const double xd = grid6.coord(0, idx[0]), yd = grid6.coord(1, idx[1]);
      const double xa = grid6.coord(4, idx[4]), ya = grid6.coord(5, idx[5]);
      // attacker inside target -> l <= 0
      if (s.target_sdf(xa, ya) <= 0.0) CHECK(costs.l.values[n] <= 0.0);
      // defender inside an obstacle -> l <= 0 regardless of the attacker
      if (s.obstacle_sdf(xd, yd) <= 0.0) CHECK(costs.l.values[n] <= 0.0);
    }
  }

  SUBCASE("classic g is zero exactly on the capture boundary") {
    // grid with defender node (10, 14) and attacker node (13, 14):
    // distance d_h = 3 exactly, attacker clear of target and obstacles
    GridSpec gb({3, 3, 3, 3, 3, 3}, {9, 13, -6, -6, 12, 13},
                {11, 15, 6, 6, 14, 15});
    auto costs = build_horizontal_costs(s, gb, CaptureVariant::Classic, nullptr);
    int idx[6] = {1, 1, 1, 1, 1, 1};
    CHECK(costs.g.at(idx) == doctest::Approx(0.0));
  }

  SUBCASE("invariant variant needs the tracking field") {
    CHECK_THROWS(build_horizontal_costs(s, grid6, CaptureVariant::InvariantSet,
                                        nullptr));
  }

  SUBCASE("invariant variant uses interpolated tracking value") {
    GridSpec grid4({5, 5, 3, 3}, {-3, -3, -6, -6}, {3, 3, 6, 6});
    // tracking value = |rel| + 1 everywhere, so margin = |rel| + 1 - d_h
    auto vh = sample_field(grid4, [](std::span<const double> x) {
      return std::hypot(x[0], x[1]) + 1.0;
    });
    auto costs =
        build_horizontal_costs(s, grid6, CaptureVariant::InvariantSet, &vh);
    // pick a node with defender == attacker position: rel = 0, margin = 1 - d_h
    int idx[6] = {2, 2, 1, 1, 2, 2};
    const double xa = grid6.coord(4, 2), ya = grid6.coord(5, 2);
    const double expected_inner =
        std::min(std::max(1.0 - s.d_h, -s.target_sdf(xa, ya)),
                 s.obstacle_sdf(xa, ya));
    CHECK(costs.g.at(idx) == doctest::Approx(-expected_inner));
  }
}

TEST_CASE("vertical cost field") {
  Scenario s = reference_scenario();
  GridSpec grid3({5, 3, 5}, {-10, -4, -10}, {10, 4, 10});

  SUBCASE("classic: |z_A - z_D| - d_z") {
    auto l = build_vertical_cost(s, grid3, CaptureVariant::Classic, nullptr);
    int idx[3] = {2, 1, 2};  // z_D == z_A == 0
    CHECK(l.at(idx) == doctest::Approx(-s.d_z));
    // capture boundary: |z_D - z_A| == d_z exactly
    GridSpec gb({3, 3, 3}, {-1, -4, -2}, {1, 4, 0});
    auto lb = build_vertical_cost(s, gb, CaptureVariant::Classic, nullptr);
    int ib[3] = {1, 1, 1};  // z_D = 0, z_A = -1, d_z = 1
    CHECK(lb.at(ib) == doctest::Approx(0.0));
  }

  SUBCASE("invariant: V - d_z interpolated") {
    GridSpec grid2({5, 3}, {-10, -4}, {10, 4});
    auto vz = sample_field(grid2, [](std::span<const double>) { return 0.4; });
    auto l = build_vertical_cost(s, grid3, CaptureVariant::InvariantSet, &vz);
    int idx[3] = {2, 1, 2};
    CHECK(l.at(idx) == doctest::Approx(0.4 - s.d_z));
  }
}

TEST_CASE("horizontal tracking cost") {
  Scenario s = reference_scenario();
  GridSpec grid4({7, 7, 3, 3}, {-3, -4, -6, -6}, {3, 4, 6, 6});

  SUBCASE("obstacle-free default is the planar distance") {
    auto l = build_tracking_cost_h(s, grid4);
    int idx[4] = {6, 6, 1, 1};  // rel = (3, 4)
    CHECK(l.at(idx) == doctest::Approx(5.0));
    int zero[4] = {3, 3, 1, 1};  // rel = (0, 0)
    CHECK(l.at(zero) == doctest::Approx(0.0));
  }

  SUBCASE("anchored variant pays K inside obstacles") {
    // anchor at the circle obstacle center: rel = 0 puts the defender inside
    auto l = build_tracking_cost_h(s, grid4, std::array<double, 2>{20.0, 16.0});
    int zero[4] = {3, 3, 1, 1};
    CHECK(l.at(zero) == doctest::Approx(s.obstacle_penalty));
    int far[4] = {6, 6, 1, 1};  // (23, 20): outside the circle
    CHECK(l.at(far) == doctest::Approx(5.0));
  }
}

TEST_CASE("attacker reach costs") {
  Scenario s = reference_scenario();
  GridSpec grid2({10, 6}, {0, 0}, {45, 25});
  auto costs = build_attacker_reach_costs(s, grid2);
  CHECK(costs.has_obstacles);
  int idx[2] = {0, 0};  // x=0 inside target (x <= 3)
  CHECK(costs.l.at(idx) <= 0.0);
  CHECK(costs.l.all_finite());
  CHECK(costs.g.all_finite());

  Scenario open = reference_scenario();
  open.obstacles.clear();
  auto free_costs = build_attacker_reach_costs(open, grid2);
  CHECK_FALSE(free_costs.has_obstacles);
  // g is a large negative surrogate so the avoid clamp never binds
  for (double v : free_costs.g.values) CHECK(v < -1e6);
}
