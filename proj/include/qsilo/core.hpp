#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsilo/rng.hpp"

namespace qsilo {

/**
 * Weight distributions for the fresh grain injected at each site.  All of
 * them have mean 1; they differ in variance, which is the single parameter
 * the second-moment equations depend on.
 */
enum class WeightDist {
  kConstant,     // point mass at 1, variance 0
  kExponential,  // mean 1, variance 1
  kUniform,      // uniform on (0, 2), variance 1/3
  kGamma,        // shape k, scale 1/k, variance 1/k
};

/** Parse "const", "exp", "uniform" or "gamma:<shape>". Throws on junk. */
std::pair<WeightDist, double> parse_weight_dist(const std::string& text);

std::string weight_dist_name(WeightDist dist, double gamma_shape);

/**
 * Static description of one simulated column: the number of interior
 * sites, the grain-weight distribution, and the master seed from which
 * every random stream is derived.
 */
struct SiloConfig {
  int n = 1;
  WeightDist dist = WeightDist::kConstant;
  double gamma_shape = 1.0;  // used only when dist == kGamma
  std::uint64_t seed = 0;

  /** Variance of one grain weight; the traditional name is alpha. */
  double weight_variance() const;

  /** Throws std::invalid_argument unless the configuration is usable. */
  void validate() const;
};

/** Column state: w[i] is the load on interior site i+1 at depth t. */
struct SiloState {
  long long t = 0;
  std::vector<double> w;
};

/**
 * Randomness consumed by one depth step: u[i] is the fraction of the load
 * on site i+1 routed to its left neighbour (the complement goes right),
 * and v[i] is the weight of the grain injected at site i+1.
 */
struct NoiseDraw {
  std::vector<double> u;
  std::vector<double> v;
};

/**
 * Stationary mean load profile: site i (1-based) carries i * (n + 1 - i)
 * grain weights on average.
 */
std::vector<double> mean_profile(int n);

/**
 * Draw the noise for one depth step.  Consumes u(1..n) first, then
 * v(1..n), from the given stream.  Each u lies in [0, 1] and each v is
 * strictly positive with mean 1.
 */
NoiseDraw sample_noise(const SiloConfig& cfg, RngStream& rng);

/**
 * Same draw as sample_noise, writing into an existing buffer so long
 * simulations avoid per-step allocation.  The caller is responsible for
 * having validated cfg once up front.
 */
void sample_noise_into(const SiloConfig& cfg, RngStream& rng,
                       NoiseDraw& noise);

/**
 * Advance one depth step.  Site i keeps nothing of its own load: it
 * receives the left-routed share of its right neighbour and the
 * right-routed share of its left neighbour, plus a fresh grain,
 *
 *   w'(i) = v(i) + u(i+1) * w(i+1) + (1 - u(i-1)) * w(i-1),
 *
 * with w(0) = w(n+1) = 0.  Mass pushed past either wall is absorbed, so
 *
 *   sum w' = sum v + sum w - u(1) * w(1) - (1 - u(n)) * w(n).
 *
 * Throws std::invalid_argument if the state and noise lengths disagree.
 */
SiloState step(const SiloState& state, const NoiseDraw& noise);

/**
 * Same update as step, writing into an existing state object.  `next`
 * must not alias `state`.
 */
void step_into(const SiloState& state, const NoiseDraw& noise,
               SiloState& next);

}  // namespace qsilo
