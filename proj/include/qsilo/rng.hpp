#pragma once

#include <cmath>
#include <cstdint>

namespace qsilo {

/**
 * Counter-based pseudo-random stream with hierarchical sub-stream
 * derivation.
 *
 * The generator is the splitmix64 output function applied to
 * key + counter * golden_gamma, so a stream is fully determined by its
 * 64-bit key and the number of values consumed.  Sub-streams derived via
 * child() depend only on the parent key and the label, never on how many
 * values the parent has produced.  Keying every (replica, layer) pair to
 * its own child stream therefore makes simulation output independent of
 * evaluation order.
 *
 * All floating-point draws consume a fixed number of raw 64-bit values
 * except gamma(), which uses rejection sampling.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed)) {}

  /** Derive an independent stream addressed by (this stream, label). */
  RngStream child(std::uint64_t label) const {
    return RngStream(mix(key_ ^ mix(label + kLabelSalt)), 0);
  }

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGamma); }

  /** Uniform on [0, 1), 53-bit resolution. */
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /** Uniform on (0, 1), strictly positive, strictly below one. */
  double uniform_pos() {
    return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /** Uniform on (0, b) with b > 0. */
  double uniform_open(double b) { return b * uniform_pos(); }

  /** Exponential with the given mean, strictly positive. */
  double exponential(double mean) { return -mean * std::log(uniform_pos()); }

  /** Standard normal via Box-Muller, no caching. */
  double normal01() {
    double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    double t = 2.0 * kPi * uniform_pos();
    return r * std::cos(t);
  }

  /**
   * Gamma with the given shape and scale (mean = shape * scale).
   * Marsaglia-Tsang squeeze for shape >= 1, boosted by a power of a
   * uniform for shape < 1.
   */
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      double boost = std::pow(uniform_pos(), 1.0 / shape);
      return gamma(shape + 1.0, scale) * boost;
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal01();
      double f = 1.0 + c * x;
      if (f <= 0.0) continue;
      double v = f * f * f;
      double u = uniform_pos();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
        return d * v * scale;
      }
    }
  }

  /** Gamma with shape 2 and the given mean, as a sum of two exponentials. */
  double gamma2_mean(double mean) {
    return exponential(0.5 * mean) + exponential(0.5 * mean);
  }

 private:
  RngStream(std::uint64_t key, int) : key_(key) {}

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kLabelSalt = 0x6a09e667f3bcc909ULL;
  static constexpr double kPi = 3.14159265358979323846;

  /** splitmix64 finalizer; bijective on 64-bit words. */
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace qsilo
