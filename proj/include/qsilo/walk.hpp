#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qsilo/rng.hpp"

namespace qsilo::walk {

/**
 * Monte Carlo oracle for the pair second-moment field.
 *
 * Two random walks on integer pairs are provided.  The absorbing pair
 * walk lives on {0..n+1}^2, moves to the four diagonal neighbors with
 * probability 1/4 each from an off-diagonal site, and from a diagonal
 * site moves along the diagonal with probability 1/3 per direction and
 * off it with probability 1/6 per direction.  Reaching row or column 0
 * or n+1 absorbs.  Accumulating source(l) at every visit to a diagonal
 * site (l,l) until absorption gives an unbiased sample of the pair
 * solution R(i,j), which the exact solvers compute independently.
 *
 * The cyclic diamond walk replaces absorption at the two sides touched
 * by the diagonal with periodic wrapping, which makes the difference of
 * coordinates Markovian on its own.  Writing u = (i+j)/2, v = (i-j)/2,
 * a step moves u on the cycle {1..n} and v on the segment absorbed at
 * |v| = (n+1)/2, so n must be odd.  From a diagonal site (v = 0) the u
 * moves carry probability 1/3 each and the v moves 1/6 each; elsewhere
 * all four moves carry 1/4.  Accumulating a constant per diagonal visit
 * bounds the pair solution through a coupling of the two walks; the
 * closed-form mean of that bound is (3/2)(n+1) times the constant.
 */

/** Pair walk position.  absorbed means row or column 0 or n+1. */
struct PairWalkState {
  int i = 0;
  int j = 0;
  bool absorbed = false;
};

/** Diamond walk position.  Invariants: i+j even and 2 <= i+j <= 2n;
 * |i-j| <= n+1 with absorbed exactly when |i-j| = n+1. */
struct DiamondWalkState {
  int i = 0;
  int j = 0;
  bool absorbed = false;
};

/** Validates 0 <= i,j <= n+1 and flags boundary starts as absorbed. */
PairWalkState make_pair_state(int n, int i, int j);

/** Validates diamond membership; requires odd n. */
DiamondWalkState make_diamond_state(int n, int i, int j);

/** One transition of the absorbing pair walk; no-op once absorbed. */
void pair_step(int n, PairWalkState& state, RngStream& rng);

/** One transition of the cyclic diamond walk; no-op once absorbed. */
void diamond_step(int n, DiamondWalkState& state, RngStream& rng);

/** Step budget 10^4 (n+1)^2, generous against the O(n^2) absorption
 * time so truncation stays rare and detectable. */
std::int64_t default_step_cap(int n);

/** One sampled path functional and how the path ended. */
struct WalkSample {
  double value = 0.0;
  bool truncated = false;
  std::int64_t steps = 0;
};

/**
 * Runs the absorbing pair walk from (i,j), adding source(l) (index
 * l-1, size n) at each diagonal visit, the starting site included.
 * max_steps = 0 selects the default cap; hitting the cap before
 * absorption marks the sample truncated.
 */
WalkSample simulate_T(int n, int i, int j, const std::vector<double>& source,
                      RngStream& rng, std::int64_t max_steps = 0);

/**
 * Runs the cyclic diamond walk from (i,j), adding the constant
 * source_bar per diagonal visit until absorption at |i-j| = n+1.
 */
WalkSample simulate_T_diamond(int n, int i, int j, double source_bar,
                              RngStream& rng, std::int64_t max_steps = 0);

/** Replica average of a walk functional at one start site. */
struct WalkEstimate {
  int i = 0;
  int j = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  double truncated_fraction = 0.0;
};

WalkEstimate estimate_T(int n, int i, int j, const std::vector<double>& source,
                        std::int64_t n_samples, RngStream& rng,
                        std::int64_t max_steps = 0);

WalkEstimate estimate_T_diamond(int n, int i, int j, double source_bar,
                                std::int64_t n_samples, RngStream& rng,
                                std::int64_t max_steps = 0);

/**
 * Closed-form mean of the diamond bound variable started on the
 * diagonal, evaluated at the extreme source values: returns
 * ((3/2)(n+1) min K, (3/2)(n+1) max K).  Every pair solution entry
 * lies between the two values; when all K are positive the first
 * entry exceeds zero, so containment checks use the sorted interval.
 */
std::pair<double, double> expected_T_bound(int n, double alpha);

}  // namespace qsilo::walk
