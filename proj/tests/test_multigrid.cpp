#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qsilo/moments.hpp"
#include "qsilo/multigrid.hpp"

using namespace qsilo;
using qsilo::mg::GridHierarchy;

TEST_CASE("construction rejects grids that cannot coarsen") {
  CHECK_THROWS_AS(GridHierarchy(6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GridHierarchy(12, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GridHierarchy(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GridHierarchy(15, -1.0), std::invalid_argument);
  CHECK(GridHierarchy(1, 0.0).levels() == 1);
  CHECK(GridHierarchy(3, 0.0).levels() == 1);
  CHECK(GridHierarchy(15, 0.0).levels() == 3);
}

TEST_CASE("ten cycles cut the residual by ten orders at n=15") {
  GridHierarchy g(15, 0.0);
  double initial = g.residual_inf();
  CHECK(initial > 1.0);
  double final = initial;
  for (int c = 0; c < 10; ++c) final = g.vcycle(2, 2);
  CHECK(final <= 1e-10 * initial);
}

TEST_CASE("residual norm decreases strictly cycle over cycle") {
  GridHierarchy g(31, 1.0);
  double prev = g.residual_inf();
  for (int c = 0; c < 8; ++c) {
    double now = g.vcycle(2, 2);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("solution matches the direct solver at n=15 in raw units") {
  GridHierarchy g(15, 0.0);
  g.solve(1e-13);
  moments::MomentField dr = moments::solve_R_direct(15, 0.0);
  double cube = 16.0 * 16.0 * 16.0;
  double worst = 0.0;
  for (int i = 1; i <= 15; ++i) {
    for (int j = i; j <= 15; j += 2) {
      worst = std::max(worst, std::abs(cube * g.r_at(i, j) - dr.r(i, j)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("scaled solutions agree with the direct solver up to n=127") {
  for (int n : {15, 63, 127}) {
    GridHierarchy g(n, 0.0);
    g.solve(1e-13);
    moments::MomentField dr = moments::solve_R_direct(n, 0.0);
    double cube = std::pow(n + 1.0, 3.0);
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; j += 2) {
        worst = std::max(worst, std::abs(g.r_at(i, j) - dr.r(i, j) / cube));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("color sweeps are idempotent and the solved grid is a fixed point") {
  GridHierarchy g(15, 0.5);
  g.vcycle(2, 2);
  auto snapshot = [&] {
    std::vector<double> v;
    for (int i = 0; i <= 16; ++i) {
      for (int j = 0; j <= 16; ++j) v.push_back(g.r_at(i, j));
    }
    return v;
  };
  g.sweep_finest(1);
  auto once = snapshot();
  g.sweep_finest(1);
  CHECK(snapshot() == once);
  g.sweep_finest(0);
  auto both = snapshot();
  g.sweep_finest(0);
  CHECK(snapshot() == both);
  CHECK_THROWS_AS(g.sweep_finest(2), std::invalid_argument);

  // Once converged, a further cycle transports a near-zero residual and
  // must leave the solution in place.
  g.solve(1e-14);
  auto solved = snapshot();
  g.vcycle(2, 2);
  auto after = snapshot();
  double moved = 0.0;
  for (std::size_t k = 0; k < solved.size(); ++k) {
    moved = std::max(moved, std::abs(after[k] - solved[k]));
  }
  CHECK(moved < 1e-12);
}

TEST_CASE("odd parity class stays identically zero") {
  GridHierarchy g(15, 0.0);
  g.solve(1e-13);
  for (int i = 1; i <= 15; ++i) {
    for (int j = 1; j <= 15; ++j) {
      if ((i + j) % 2 == 1) CHECK(g.r_at(i, j) == 0.0);
    }
  }
}

TEST_CASE("scaled solution stays order one as n grows") {
  for (int n : {15, 63, 255}) {
    GridHierarchy g(n, 0.0);
    g.solve(1e-12);
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; j += 2) {
        worst = std::max(worst, std::abs(g.r_at(i, j)));
      }
    }
    CHECK(worst < 1.0);
    CHECK(worst > 0.01);
  }
}

TEST_CASE("diagonal profile is symmetric with zero endpoints") {
  GridHierarchy g(31, 0.0);
  g.solve(1e-13);
  auto p = mg::diagonal_profile(g);
  REQUIRE(p.size() == 33);
  CHECK(p.front() == 0.0);
  CHECK(p.back() == 0.0);
  for (int i = 0; i <= 32; ++i) {
    CHECK(p[static_cast<std::size_t>(i)] ==
          doctest::Approx(p[static_cast<std::size_t>(32 - i)]).epsilon(1e-10));
  }
}

TEST_CASE("diagonal profiles stabilize between n=63 and n=127") {
  GridHierarchy a(63, 0.0), b(127, 0.0);
  a.solve(1e-13);
  b.solve(1e-13);
  auto pa = mg::diagonal_profile(a);
  auto pb = mg::diagonal_profile(b);
  double sup = 0.0;
  // Coinciding abscissas: i/64 = (2i)/128.
  for (int i = 0; i <= 64; ++i) {
    sup = std::max(sup, std::abs(pa[static_cast<std::size_t>(i)] -
                                 pb[static_cast<std::size_t>(2 * i)]));
  }
  CHECK(sup < 2e-2);
  CHECK(sup > 0.0);
}

TEST_CASE("corner series matches the direct solver and keeps falling") {
  auto series = mg::corner_series({15, 31, 63}, 0.0);
  REQUIRE(series.size() == 3);
  CHECK(series[0].value == doctest::Approx(-0.820778).epsilon(1e-4));
  CHECK(series[1].value == doctest::Approx(-1.489022).epsilon(1e-4));
  CHECK(series[2].value == doctest::Approx(-2.018734).epsilon(1e-4));
  CHECK(series[1].value < series[0].value);
  CHECK(series[2].value < series[1].value);
}

TEST_CASE("solved grid satisfies the covariance balance through to_field") {
  for (int n : {15, 63}) {
    GridHierarchy g(n, 1.0);
    g.solve(1e-13);
    moments::MomentField f = g.to_field();
    CHECK(moments::covariance_residual(f) < 1e-10);
    for (int i = 1; i <= n; ++i) CHECK(f.sigma(i, i) >= 0.0);
  }
}

TEST_CASE("a starved cycle budget raises the typed error") {
  GridHierarchy g(31, 0.0);
  CHECK_THROWS_AS(g.solve(1e-13, 1), moments::NonConvergence);
  CHECK_THROWS_AS(g.solve(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.vcycle(0, 0), std::invalid_argument);
}
