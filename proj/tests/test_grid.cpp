#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "hjra/grid.hpp"
#include "hjra/hjvf.hpp"

using namespace hjra;

namespace {

ScalarField fill(const GridSpec& spec,
                 const std::function<double(std::span<const double>)>& fn) {
  return sample_field(spec, fn);
}

}  // namespace

TEST_CASE("grid geometry invariants") {
  GridSpec g({5, 7}, {-1.0, 2.0}, {1.0, 5.0});
  CHECK(g.ndim() == 2);
  CHECK(g.numel() == 35);
  CHECK(g.axis(0).spacing == doctest::Approx(0.5));
  CHECK(g.axis(1).spacing == doctest::Approx(0.5));

  // node coordinate = min + i*spacing, reproducible through nearest()
  for (int i = 0; i < 5; ++i) {
    const double x = g.coord(0, i);
    CHECK(x == -1.0 + i * g.axis(0).spacing);
    CHECK(g.nearest(0, x) == i);
  }

  CHECK_THROWS(GridSpec({2, 5}, {0, 0}, {1, 1}));   // < 3 nodes
  CHECK_THROWS(GridSpec({5, 5}, {0, 2}, {1, 2}));   // max == min
}

TEST_CASE("flattened index order: last axis fastest") {
  GridSpec g({3, 4, 5}, {0, 0, 0}, {1, 1, 1});
  ScalarField f(g);
  const int idx[3] = {1, 2, 3};
  f.at(idx) = 42.0;
  // idx = ((i0*n1 + i1)*n2 + i2)
  CHECK(f.values[(1 * 4 + 2) * 5 + 3] == 42.0);

  int back[3];
  g.unflatten(g.flatten(idx), back);
  CHECK(back[0] == 1);
  CHECK(back[1] == 2);
  CHECK(back[2] == 3);
}

TEST_CASE("one-sided derivatives") {
  SUBCASE("linear field has slope 2 everywhere including edges") {
    GridSpec g({11}, {-2.0}, {3.0});
    auto f = fill(g, [](std::span<const double> x) { return 2.0 * x[0]; });
    auto [dm, dp] = one_sided_derivatives(f, 0);
    for (std::size_t n = 0; n < g.numel(); ++n) {
      CHECK(dm.values[n] == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(dp.values[n] == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  SUBCASE("constant field has zero slope") {
    GridSpec g({9, 5}, {0, 0}, {1, 1});
    auto f = fill(g, [](std::span<const double>) { return 3.5; });
    for (int axis = 0; axis < 2; ++axis) {
      auto [dm, dp] = one_sided_derivatives(f, axis);
      for (std::size_t n = 0; n < g.numel(); ++n) {
        CHECK(dm.values[n] == 0.0);
        CHECK(dp.values[n] == 0.0);
      }
    }
  }
  SUBCASE("|x| kink at node x=0 with spacing 1") {
    GridSpec g({7}, {-3.0}, {3.0});
    auto f = fill(g, [](std::span<const double> x) { return std::abs(x[0]); });
    auto [dm, dp] = one_sided_derivatives(f, 0);
    const int mid[1] = {3};
    CHECK(dm.values[g.flatten(mid)] == doctest::Approx(-1.0));
    CHECK(dp.values[g.flatten(mid)] == doctest::Approx(+1.0));
  }
  SUBCASE("axis out of range") {
    GridSpec g({5}, {0.0}, {1.0});
    ScalarField f(g);
    CHECK_THROWS(one_sided_derivatives(f, 1));
  }
}

TEST_CASE("interpolation") {
  SUBCASE("reproduces node values exactly") {
    GridSpec g({5, 4, 3}, {0, -1, 2}, {2, 1, 3});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    ScalarField f(g);
    for (auto& v : f.values) v = u(rng);
    int idx[3];
    for (std::size_t n = 0; n < g.numel(); ++n) {
      g.unflatten(n, idx);
      double pt[3];
      g.node_coords(idx, pt);
      CHECK(interpolate(f, pt) == doctest::Approx(f.values[n]).epsilon(1e-14));
    }
  }
  SUBCASE("1D midpoint of nodes valued 1 and 3 is 2") {
    GridSpec g({3}, {0.0}, {2.0});
    ScalarField f(g);
    f.values = {1.0, 3.0, 5.0};
    const double pt[1] = {0.5};
    CHECK(interpolate(f, pt) == doctest::Approx(2.0));
  }
  SUBCASE("2D cell center averages the four corners") {
    GridSpec g({3, 3}, {0, 0}, {2, 2});
    auto f = fill(g, [](std::span<const double> x) {
      return x[0] * 2.0 + x[1];  // corners of first cell: 0,1,2,3
    });
    const double pt[2] = {0.5, 0.5};
    CHECK(interpolate(f, pt) == doctest::Approx(1.5));
  }
  SUBCASE("affine exactness to 1e-12 relative") {
    GridSpec g({7, 5, 6}, {-1, 0, 2}, {4, 3, 7});
    auto f = fill(g, [](std::span<const double> x) {
      return 1.5 * x[0] - 2.25 * x[1] + 0.125 * x[2] + 3.0;
    });
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
      double pt[3];
      for (int a = 0; a < 3; ++a) {
        std::uniform_real_distribution<double> u(g.axis(a).lo, g.axis(a).hi);
        pt[a] = u(rng);
      }
      const double expect = 1.5 * pt[0] - 2.25 * pt[1] + 0.125 * pt[2] + 3.0;
      CHECK(interpolate(f, pt) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("clamping flag and behavior") {
    GridSpec g({3}, {0.0}, {2.0});
    ScalarField f(g);
    f.values = {1.0, 2.0, 7.0};
    bool clamped = false;
    CHECK(interpolate(f, std::vector<double>{-1.0}, &clamped) ==
          doctest::Approx(1.0));
    CHECK(clamped);
    CHECK(interpolate(f, std::vector<double>{5.0}, &clamped) ==
          doctest::Approx(7.0));
    CHECK(clamped);
    interpolate(f, std::vector<double>{1.0}, &clamped);
    CHECK_FALSE(clamped);
    CHECK_THROWS(interpolate(f, std::vector<double>{std::nan("")}));
  }
}

TEST_CASE("gradient sampling") {
  SUBCASE("linear field gradient is exact everywhere") {
    GridSpec g({9, 7}, {-2, -3}, {2, 3});
    auto f = fill(g, [](std::span<const double> x) {
      return 3.0 * x[0] + 4.0 * x[1];
    });
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
      double pt[2];
      for (int a = 0; a < 2; ++a) {
        std::uniform_real_distribution<double> u(g.axis(a).lo, g.axis(a).hi);
        pt[a] = u(rng);
      }
      double grad[2];
      gradient_at(f, pt, grad);
      CHECK(grad[0] == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(grad[1] == doctest::Approx(4.0).epsilon(1e-12));
    }
  }
  SUBCASE("constant field gives the zero vector") {
    GridSpec g({5}, {0.0}, {1.0});
    auto f = fill(g, [](std::span<const double>) { return 9.0; });
    double grad[1];
    gradient_at(f, std::vector<double>{0.37}, grad);
    CHECK(grad[0] == 0.0);
  }
  SUBCASE("central difference exact for x^2 at interior nodes") {
    GridSpec g({9}, {-2.0}, {2.0});
    auto f = fill(g, [](std::span<const double> x) { return x[0] * x[0]; });
    for (int i = 1; i < 8; ++i) {
      const double x0 = g.coord(0, i);
      double grad[1];
      gradient_at(f, std::vector<double>{x0}, grad);
      CHECK(grad[0] == doctest::Approx(2.0 * x0).epsilon(1e-12));
    }
  }
}

TEST_CASE("HJVF round trip") {
  GridSpec g({4, 3, 5}, {0, -1, 2}, {1, 1, 4});
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-10, 10);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);

  const std::string path = "test_field.hjvf";
  write_hjvf(path, f);
  const ScalarField back = read_hjvf(path);
  CHECK(back.spec == g);
  CHECK(back.values == f.values);

  FieldMeta meta;
  meta.dynamics = "test";
  meta.parameter_hash = "0123456789abcdef";
  meta.horizon = 2.5;
  meta.tolerance = 1e-3;
  meta.iterations = 42;
  meta.converged = true;
  write_meta(path, meta);
  const FieldMeta back_meta = read_meta(path);
  CHECK(back_meta.dynamics == "test");
  CHECK(back_meta.parameter_hash == meta.parameter_hash);
  CHECK(back_meta.iterations == 42);
  CHECK(back_meta.converged);
  std::remove(path.c_str());
  std::remove(meta_path_for(path).c_str());
}
