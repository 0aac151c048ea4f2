#include "qsilo/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "qsilo/moments.hpp"

namespace qsilo::walk {

namespace {

void require_n(int n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
}

bool on_pair_boundary(int n, int i, int j) {
  return i == 0 || i == n + 1 || j == 0 || j == n + 1;
}

}  // namespace

PairWalkState make_pair_state(int n, int i, int j) {
  require_n(n);
  if (i < 0 || i > n + 1 || j < 0 || j > n + 1)
    throw std::invalid_argument("start site outside {0..n+1}^2");
  return PairWalkState{i, j, on_pair_boundary(n, i, j)};
}

DiamondWalkState make_diamond_state(int n, int i, int j) {
  require_n(n);
  if (n % 2 == 0)
    throw std::invalid_argument("diamond walk needs odd n: |i-j| = n+1 is "
                                "unreachable on the even difference lattice");
  if ((i + j) % 2 != 0) throw std::invalid_argument("i+j must be even");
  if (i + j < 2 || i + j > 2 * n)
    throw std::invalid_argument("i+j outside [2, 2n]");
  if (std::abs(i - j) > n + 1)
    throw std::invalid_argument("|i-j| exceeds n+1");
  return DiamondWalkState{i, j, std::abs(i - j) == n + 1};
}

void pair_step(int n, PairWalkState& state, RngStream& rng) {
  if (state.absorbed) return;
  double r = rng.uniform01();
  int di, dj;
  if (state.i == state.j) {
    if (r < 1.0 / 3.0) {
      di = 1, dj = 1;
    } else if (r < 2.0 / 3.0) {
      di = -1, dj = -1;
    } else if (r < 5.0 / 6.0) {
      di = 1, dj = -1;
    } else {
      di = -1, dj = 1;
    }
  } else {
    if (r < 0.25) {
      di = 1, dj = 1;
    } else if (r < 0.5) {
      di = -1, dj = -1;
    } else if (r < 0.75) {
      di = 1, dj = -1;
    } else {
      di = -1, dj = 1;
    }
  }
  state.i += di;
  state.j += dj;
  state.absorbed = on_pair_boundary(n, state.i, state.j);
}

void diamond_step(int n, DiamondWalkState& state, RngStream& rng) {
  if (state.absorbed) return;
  int u = (state.i + state.j) / 2;
  int v = (state.i - state.j) / 2;
  double r = rng.uniform01();
  if (v == 0) {
    if (r < 1.0 / 3.0) {
      ++u;
    } else if (r < 2.0 / 3.0) {
      --u;
    } else if (r < 5.0 / 6.0) {
      ++v;
    } else {
      --v;
    }
  } else {
    if (r < 0.25) {
      ++u;
    } else if (r < 0.5) {
      --u;
    } else if (r < 0.75) {
      ++v;
    } else {
      --v;
    }
  }
  if (u == 0) u = n;
  if (u == n + 1) u = 1;
  state.i = u + v;
  state.j = u - v;
  state.absorbed = 2 * std::abs(v) == n + 1;
}

std::int64_t default_step_cap(int n) {
  return 10000ll * (n + 1) * (n + 1);
}

namespace {

std::int64_t resolve_cap(int n, std::int64_t max_steps) {
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  return max_steps == 0 ? default_step_cap(n) : max_steps;
}

template <typename State, typename Step, typename Gain>
WalkSample run_walk(State state, std::int64_t cap, Step step, Gain gain) {
  WalkSample out;
  while (!state.absorbed) {
    if (state.i == state.j) out.value += gain(state.i);
    if (out.steps >= cap) {
      out.truncated = true;
      break;
    }
    step(state);
    ++out.steps;
  }
  return out;
}

}  // namespace

WalkSample simulate_T(int n, int i, int j, const std::vector<double>& source,
                      RngStream& rng, std::int64_t max_steps) {
  if (source.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("source must have one entry per site 1..n");
  std::int64_t cap = resolve_cap(n, max_steps);
  return run_walk(
      make_pair_state(n, i, j), cap,
      [&](PairWalkState& s) { pair_step(n, s, rng); },
      [&](int l) { return source[static_cast<std::size_t>(l - 1)]; });
}

WalkSample simulate_T_diamond(int n, int i, int j, double source_bar,
                              RngStream& rng, std::int64_t max_steps) {
  std::int64_t cap = resolve_cap(n, max_steps);
  return run_walk(
      make_diamond_state(n, i, j), cap,
      [&](DiamondWalkState& s) { diamond_step(n, s, rng); },
      [&](int) { return source_bar; });
}

namespace {

template <typename Draw>
WalkEstimate accumulate(int i, int j, std::int64_t n_samples, Draw draw) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  WalkEstimate out;
  out.i = i;
  out.j = j;
  out.n_samples = n_samples;
  double mean = 0.0, m2 = 0.0;
  std::int64_t truncated = 0;
  for (std::int64_t k = 1; k <= n_samples; ++k) {
    WalkSample s = draw();
    if (s.truncated) ++truncated;
    double d = s.value - mean;
    mean += d / double(k);
    m2 += d * (s.value - mean);
  }
  out.estimate = mean;
  if (n_samples > 1)
    out.std_error = std::sqrt(m2 / (double(n_samples) * double(n_samples - 1)));
  out.truncated_fraction = double(truncated) / double(n_samples);
  return out;
}

}  // namespace

WalkEstimate estimate_T(int n, int i, int j, const std::vector<double>& source,
                        std::int64_t n_samples, RngStream& rng,
                        std::int64_t max_steps) {
  return accumulate(i, j, n_samples, [&] {
    return simulate_T(n, i, j, source, rng, max_steps);
  });
}

WalkEstimate estimate_T_diamond(int n, int i, int j, double source_bar,
                                std::int64_t n_samples, RngStream& rng,
                                std::int64_t max_steps) {
  return accumulate(i, j, n_samples, [&] {
    return simulate_T_diamond(n, i, j, source_bar, rng, max_steps);
  });
}

std::pair<double, double> expected_T_bound(int n, double alpha) {
  std::vector<double> k = moments::source_K(n, alpha);
  auto [lo, hi] = std::minmax_element(k.begin(), k.end());
  double scale = 1.5 * double(n + 1);
  return {scale * *lo, scale * *hi};
}

}  // namespace qsilo::walk
