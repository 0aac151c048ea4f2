#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qsilo/core.hpp"
#include "qsilo/rng.hpp"

using namespace qsilo;

namespace {

SiloConfig make_config(int n, WeightDist dist, std::uint64_t seed = 1,
                       double shape = 1.0) {
  SiloConfig cfg;
  cfg.n = n;
  cfg.dist = dist;
  cfg.gamma_shape = shape;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("mean_profile is i*(n+1-i)") {
  CHECK(mean_profile(1) == std::vector<double>{1.0});
  CHECK(mean_profile(3) == std::vector<double>{3.0, 4.0, 3.0});
  CHECK(mean_profile(4) == std::vector<double>{4.0, 6.0, 6.0, 4.0});
  auto w = mean_profile(127);
  CHECK(w[63] == 64.0 * 64.0);
  CHECK(w[0] == 127.0);
  CHECK(w[126] == 127.0);
  CHECK_THROWS_AS(mean_profile(0), std::invalid_argument);
}

TEST_CASE("step reproduces the two-site hand example") {
  SiloState s;
  s.t = 5;
  s.w = {2.0, 2.0};
  NoiseDraw nz;
  nz.u = {0.25, 0.75};
  nz.v = {1.0, 1.0};
  SiloState next = step(s, nz);
  CHECK(next.t == 6);
  CHECK(next.w[0] == doctest::Approx(2.5));
  CHECK(next.w[1] == doctest::Approx(2.5));
}

TEST_CASE("a single site forwards everything to the walls") {
  SiloState s;
  s.w = {17.0};
  NoiseDraw nz;
  nz.u = {0.3};
  nz.v = {1.0};
  CHECK(step(s, nz).w == std::vector<double>{1.0});
}

TEST_CASE("stepping the zero state yields the fresh grain weights") {
  SiloState s;
  s.w = {0.0, 0.0, 0.0};
  NoiseDraw nz;
  nz.u = {0.9, 0.1, 0.4};
  nz.v = {1.0, 1.0, 1.0};
  CHECK(step(s, nz).w == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("step rejects mismatched lengths") {
  SiloState s;
  s.w = {1.0, 2.0};
  NoiseDraw nz;
  nz.u = {0.5};
  nz.v = {1.0};
  CHECK_THROWS_AS(step(s, nz), std::invalid_argument);
}

TEST_CASE("mass balances against the two wall losses exactly") {
  SiloConfig cfg = make_config(17, WeightDist::kExponential, 99);
  RngStream rng(cfg.seed);
  SiloState s;
  s.w = mean_profile(cfg.n);
  for (int round = 0; round < 200; ++round) {
    RngStream layer = rng.child(static_cast<std::uint64_t>(round));
    NoiseDraw nz = sample_noise(cfg, layer);
    SiloState next = step(s, nz);
    double in = std::accumulate(nz.v.begin(), nz.v.end(), 0.0);
    double before = std::accumulate(s.w.begin(), s.w.end(), 0.0);
    double after = std::accumulate(next.w.begin(), next.w.end(), 0.0);
    double lost = nz.u.front() * s.w.front() +
                  (1.0 - nz.u.back()) * s.w.back();
    CHECK(after == doctest::Approx(before + in - lost).epsilon(1e-12));
    s = std::move(next);
  }
}

TEST_CASE("the mean profile is an exact fixed point of the averaged step") {
  // With u identically 1/2 and v identically 1 the update is the
  // expectation operator itself, and i*(n+1-i) satisfies
  // w(i) = 1 + (w(i-1) + w(i+1)) / 2 including at the walls.
  const int n = 40;
  SiloState s;
  s.w = mean_profile(n);
  NoiseDraw nz;
  nz.u.assign(n, 0.5);
  nz.v.assign(n, 1.0);
  SiloState next = step(s, nz);
  for (int i = 0; i < n; ++i) {
    CHECK(next.w[i] == doctest::Approx(s.w[i]).epsilon(1e-13));
  }
}

TEST_CASE("empirical one-step mean returns to the profile") {
  SiloConfig cfg = make_config(5, WeightDist::kExponential, 1234);
  std::vector<double> acc(5, 0.0);
  const int rounds = 200000;
  RngStream root(cfg.seed);
  SiloState s;
  s.w = mean_profile(cfg.n);
  for (int round = 0; round < rounds; ++round) {
    RngStream layer = root.child(static_cast<std::uint64_t>(round));
    NoiseDraw nz = sample_noise(cfg, layer);
    SiloState next = step(s, nz);
    for (int i = 0; i < 5; ++i) acc[i] += next.w[i];
  }
  auto want = mean_profile(5);
  for (int i = 0; i < 5; ++i) {
    CHECK(acc[i] / rounds == doctest::Approx(want[i]).epsilon(0.01));
  }
}

TEST_CASE("sites only feel opposite-parity sites one step back") {
  const int n = 9;
  RngStream rng(5);
  SiloConfig cfg = make_config(n, WeightDist::kUniform, 5);
  NoiseDraw nz = sample_noise(cfg, rng);
  SiloState a, b;
  a.w = mean_profile(n);
  b.w = a.w;
  // Perturb only even 1-based sites; odd sites of the next layer move,
  // even sites must not.
  for (int i = 1; i < n; i += 2) b.w[i] += 1.0;
  SiloState na = step(a, nz);
  SiloState nb = step(b, nz);
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      CHECK(na.w[i] != nb.w[i]);
    } else {
      CHECK(na.w[i] == nb.w[i]);
    }
  }
}

TEST_CASE("shared noise preserves componentwise ordering exactly") {
  const int n = 12;
  RngStream rng(77);
  SiloConfig cfg = make_config(n, WeightDist::kGamma, 77, 2.0);
  SiloState hi, lo;
  hi.w.resize(n);
  lo.w.resize(n);
  for (int i = 0; i < n; ++i) {
    lo.w[i] = rng.uniform01() * 10.0;
    hi.w[i] = lo.w[i] + rng.uniform01() * 3.0;
  }
  for (int round = 0; round < 100; ++round) {
    NoiseDraw nz = sample_noise(cfg, rng);
    hi = step(hi, nz);
    lo = step(lo, nz);
    for (int i = 0; i < n; ++i) CHECK(hi.w[i] >= lo.w[i]);
  }
}

TEST_CASE("sample_noise is deterministic per stream and well ranged") {
  SiloConfig cfg = make_config(64, WeightDist::kExponential, 2024);
  RngStream a(cfg.seed), b(cfg.seed);
  NoiseDraw na = sample_noise(cfg, a);
  NoiseDraw nb = sample_noise(cfg, b);
  CHECK(na.u == nb.u);
  CHECK(na.v == nb.v);
  for (double u : na.u) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
  }
  for (double v : na.v) CHECK(v > 0.0);
}

TEST_CASE("exponential grain weights average to one over a long run") {
  SiloConfig cfg = make_config(1000, WeightDist::kExponential, 31);
  RngStream root(cfg.seed);
  double sum = 0.0;
  const int layers = 1000;
  for (int layer = 0; layer < layers; ++layer) {
    RngStream s = root.child(static_cast<std::uint64_t>(layer));
    NoiseDraw nz = sample_noise(cfg, s);
    sum += std::accumulate(nz.v.begin(), nz.v.end(), 0.0);
  }
  CHECK(sum / (1000.0 * layers) == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("weight distribution menu parses and reports variance") {
  CHECK(parse_weight_dist("const") ==
        std::pair<WeightDist, double>{WeightDist::kConstant, 1.0});
  CHECK(parse_weight_dist("exp").first == WeightDist::kExponential);
  CHECK(parse_weight_dist("uniform").first == WeightDist::kUniform);
  auto [dist, shape] = parse_weight_dist("gamma:4");
  CHECK(dist == WeightDist::kGamma);
  CHECK(shape == doctest::Approx(4.0));
  CHECK_THROWS_AS(parse_weight_dist("gamma:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_dist("gamma:-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_dist("triangle"), std::invalid_argument);

  CHECK(make_config(3, WeightDist::kConstant).weight_variance() == 0.0);
  CHECK(make_config(3, WeightDist::kExponential).weight_variance() == 1.0);
  CHECK(make_config(3, WeightDist::kUniform).weight_variance() ==
        doctest::Approx(1.0 / 3.0));
  CHECK(make_config(3, WeightDist::kGamma, 1, 8.0).weight_variance() ==
        doctest::Approx(0.125));

  CHECK(weight_dist_name(WeightDist::kUniform, 1.0) == "uniform");
  CHECK(weight_dist_name(WeightDist::kGamma, 4.0).rfind("gamma:4", 0) == 0);

  SiloConfig bad = make_config(0, WeightDist::kConstant);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("buffer-reusing variants match the allocating ones exactly") {
  SiloConfig cfg = make_config(9, WeightDist::kExponential, 4242);
  RngStream a(7), b(7);
  NoiseDraw fresh = sample_noise(cfg, a);
  NoiseDraw reused;
  reused.u.assign(3, -1.0);  // wrong-sized buffer must be adapted
  sample_noise_into(cfg, b, reused);
  CHECK(fresh.u == reused.u);
  CHECK(fresh.v == reused.v);

  SiloState state{0, mean_profile(9)};
  SiloState copy = step(state, fresh);
  SiloState target;
  step_into(state, fresh, target);
  CHECK(copy.t == target.t);
  CHECK(copy.w == target.w);
}
