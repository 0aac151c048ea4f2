#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "qsilo/moments.hpp"
#include "qsilo/rng.hpp"
#include "qsilo/walk.hpp"

using namespace qsilo;
using namespace qsilo::walk;

TEST_CASE("closed-form bound evaluates the extreme source values") {
  auto b3 = expected_T_bound(3, 0.0);
  CHECK(b3.first == 6.0);
  CHECK(b3.second == 42.0);

  auto b1 = expected_T_bound(1, 0.0);
  CHECK(b1.first == 3.0);
  CHECK(b1.second == 3.0);

  auto b2 = expected_T_bound(2, 0.0);
  CHECK(b2.first == 9.0);
  CHECK(b2.second == 9.0);

  // At n = 63 the source changes sign, so the two values straddle zero.
  auto b63 = expected_T_bound(63, 0.0);
  CHECK(b63.first == doctest::Approx(-357024.0).epsilon(1e-12));
  CHECK(b63.second == doctest::Approx(196512.0).epsilon(1e-12));
}

TEST_CASE("state construction validates domains") {
  CHECK_NOTHROW(make_pair_state(3, 0, 2));
  CHECK(make_pair_state(3, 0, 2).absorbed);
  CHECK(make_pair_state(3, 4, 4).absorbed);
  CHECK_FALSE(make_pair_state(3, 2, 2).absorbed);
  CHECK_THROWS_AS(make_pair_state(3, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_pair_state(3, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(make_pair_state(0, 0, 0), std::invalid_argument);

  CHECK_THROWS_AS(make_diamond_state(4, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_diamond_state(3, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_diamond_state(3, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_diamond_state(3, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_diamond_state(3, 6, 0), std::invalid_argument);
  CHECK_FALSE(make_diamond_state(3, 2, 2).absorbed);
  CHECK(make_diamond_state(3, 3, -1).absorbed);
  CHECK(make_diamond_state(3, -1, 3).absorbed);
}

TEST_CASE("absorbed starts yield zero without consuming randomness") {
  RngStream rng(11);
  auto k = moments::source_K(3, 0.0);
  WalkSample s = simulate_T(3, 0, 2, k, rng);
  CHECK(s.value == 0.0);
  CHECK(s.steps == 0);
  CHECK_FALSE(s.truncated);

  WalkSample d = simulate_T_diamond(3, 3, -1, 7.0, rng);
  CHECK(d.value == 0.0);
  CHECK(d.steps == 0);

  // The two draws above consumed nothing, so a fresh stream agrees.
  RngStream a(99), b(99);
  simulate_T(3, 0, 2, k, a);
  CHECK(a.uniform01() == b.uniform01());
}

TEST_CASE("single-site chain always pays the source once") {
  auto k = moments::source_K(1, 0.0);
  RngStream rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    WalkSample s = simulate_T(1, 1, 1, k, rng);
    CHECK(s.value == 1.0);
    CHECK(s.steps == 1);
    CHECK_FALSE(s.truncated);
  }
}

TEST_CASE("difference of diamond coordinates moves as the lazy chain") {
  const int n = 7;
  RngStream rng(31);
  DiamondWalkState s = make_diamond_state(n, 4, 4);
  // tally[c][m]: class c (0 = diagonal, 1 = off-diagonal), move m
  // (0 = difference down, 1 = hold, 2 = difference up).
  std::array<std::array<long, 3>, 2> tally{};
  long invariant_violations = 0;
  const long transitions = 1000000;
  for (long t = 0; t < transitions; ++t) {
    if (s.absorbed) s = make_diamond_state(n, 4, 4);
    int z0 = s.i - s.j;
    diamond_step(n, s, rng);
    int z1 = s.i - s.j;
    int dv = (z1 - z0) / 2;
    tally[z0 == 0 ? 0 : 1][static_cast<std::size_t>(dv + 1)] +=
        1;
    bool ok = (s.i + s.j) % 2 == 0 && s.i + s.j >= 2 && s.i + s.j <= 2 * n &&
              std::abs(s.i - s.j) <= n + 1 &&
              s.absorbed == (std::abs(s.i - s.j) == n + 1);
    if (!ok) ++invariant_violations;
  }
  CHECK(invariant_violations == 0);

  auto within = [](long hits, long total, double p) {
    double phat = double(hits) / double(total);
    double band = 4.5 * std::sqrt(p * (1.0 - p) / double(total));
    return std::abs(phat - p) <= band;
  };
  long diag_total = tally[0][0] + tally[0][1] + tally[0][2];
  long off_total = tally[1][0] + tally[1][1] + tally[1][2];
  CHECK(diag_total > 100000);
  CHECK(off_total > 100000);
  CHECK(within(tally[0][1], diag_total, 2.0 / 3.0));
  CHECK(within(tally[0][0], diag_total, 1.0 / 6.0));
  CHECK(within(tally[0][2], diag_total, 1.0 / 6.0));
  CHECK(within(tally[1][1], off_total, 0.5));
  CHECK(within(tally[1][0], off_total, 0.25));
  CHECK(within(tally[1][2], off_total, 0.25));
}

TEST_CASE("diagonal sojourns decompose into geometric visits") {
  const int n = 3;
  RngStream rng(41);
  const int paths = 200000;
  double sum_visits = 0.0, sum_time = 0.0;
  long total_visits = 0, total_time = 0;
  for (int p = 0; p < paths; ++p) {
    DiamondWalkState s = make_diamond_state(n, 2, 2);
    long visits = 0, time_on_diag = 0;
    bool on_diag = false;
    while (!s.absorbed) {
      bool now = s.i == s.j;
      if (now) {
        ++time_on_diag;
        if (!on_diag) ++visits;
      }
      on_diag = now;
      diamond_step(n, s, rng);
    }
    sum_visits += double(visits);
    sum_time += double(time_on_diag);
    total_visits += visits;
    total_time += time_on_diag;
  }
  double mean_visits = sum_visits / paths;
  double mean_time = sum_time / paths;
  double mean_run = double(total_time) / double(total_visits);
  // Visit count is geometric with mean (n+1)/2, run length geometric
  // with mean 3, total diagonal time has mean 6 and variance 30.
  CHECK(std::abs(mean_visits - 2.0) < 0.010);
  CHECK(std::abs(mean_time - 6.0) < 0.037);
  CHECK(std::abs(mean_run - 3.0) < 0.020);
}

TEST_CASE("diamond bound estimate matches its closed-form mean") {
  RngStream rng(51);
  WalkEstimate e = estimate_T_diamond(3, 2, 2, 7.0, 100000, rng);
  CHECK(e.n_samples == 100000);
  CHECK(e.truncated_fraction == 0.0);
  CHECK(e.std_error > 0.09);
  CHECK(e.std_error < 0.16);
  CHECK(std::abs(e.estimate - 42.0) <= 3.0 * e.std_error);
}

TEST_CASE("absorbing walk reproduces the exact pair solution") {
  auto check_pair = [](int n, double alpha, int i, int j, std::uint64_t seed,
                       std::int64_t samples) {
    auto field = moments::solve_R_direct(n, alpha);
    auto k = moments::source_K(n, alpha);
    RngStream rng(seed);
    WalkEstimate e = estimate_T(n, i, j, k, samples, rng);
    double truth = field.r(i, j);
    CHECK(e.truncated_fraction == 0.0);
    if (e.std_error == 0.0) {
      CHECK(e.estimate == truth);
    } else {
      double z = std::abs(e.estimate - truth) / e.std_error;
      CHECK(z <= 3.0);
    }
  };

  check_pair(1, 0.0, 1, 1, 61, 100);
  check_pair(2, 0.0, 1, 1, 62, 40000);
  check_pair(2, 0.0, 2, 2, 63, 40000);
  check_pair(3, 0.0, 1, 1, 64, 40000);
  check_pair(3, 0.0, 2, 2, 65, 40000);
  check_pair(3, 0.0, 3, 3, 66, 40000);
  check_pair(3, 0.0, 1, 3, 67, 40000);
  check_pair(3, 0.0, 3, 1, 68, 40000);
  check_pair(3, 1.0, 2, 2, 69, 40000);

  // Odd-parity starts never touch the diagonal, exact zero both sides.
  RngStream rng(70);
  auto k2 = moments::source_K(2, 0.0);
  WalkEstimate odd = estimate_T(2, 1, 2, k2, 500, rng);
  CHECK(odd.estimate == 0.0);
  CHECK(odd.std_error == 0.0);

  // Source identically zero makes every sample exactly zero.
  auto k21 = moments::source_K(2, 1.0);
  CHECK(k21[0] == 0.0);
  CHECK(k21[1] == 0.0);
}

TEST_CASE("exact solution stays inside the bound interval at n = 63") {
  const int n = 63;
  auto field = moments::solve_R_direct(n, 0.0);
  auto [a, b] = expected_T_bound(n, 0.0);
  double lo = std::min(a, b), hi = std::max(a, b);
  int violations = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      double v = field.r(i, j);
      if (v < lo || v > hi) ++violations;
    }
  CHECK(violations == 0);
}

TEST_CASE("step cap marks unfinished paths as truncated") {
  CHECK(default_step_cap(5) == 360000);
  auto k = moments::source_K(5, 0.0);
  RngStream rng(81);
  WalkSample s = simulate_T(5, 3, 3, k, rng, 1);
  CHECK(s.truncated);
  CHECK(s.steps == 1);

  RngStream rng2(82);
  WalkEstimate e = estimate_T(5, 3, 3, k, 200, rng2, 1);
  CHECK(e.truncated_fraction == 1.0);

  CHECK_THROWS_AS(simulate_T(5, 3, 3, k, rng, -1), std::invalid_argument);
  std::vector<double> wrong(4, 0.0);
  CHECK_THROWS_AS(simulate_T(5, 3, 3, wrong, rng), std::invalid_argument);
}

TEST_CASE("identical seeds reproduce estimates bit for bit") {
  auto k = moments::source_K(3, 0.0);
  RngStream a(91), b(91);
  WalkEstimate ea = estimate_T(3, 2, 2, k, 5000, a);
  WalkEstimate eb = estimate_T(3, 2, 2, k, 5000, b);
  CHECK(ea.estimate == eb.estimate);
  CHECK(ea.std_error == eb.std_error);

  RngStream c(92), d(93);
  WalkEstimate ec = estimate_T(3, 2, 2, k, 5000, c);
  WalkEstimate ed = estimate_T(3, 2, 2, k, 5000, d);
  CHECK(ec.estimate != ed.estimate);
}
