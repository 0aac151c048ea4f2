#include "qsilo/core.hpp"

#include <charconv>
#include <stdexcept>

namespace qsilo {

std::pair<WeightDist, double> parse_weight_dist(const std::string& text) {
  if (text == "const") return {WeightDist::kConstant, 1.0};
  if (text == "exp") return {WeightDist::kExponential, 1.0};
  if (text == "uniform") return {WeightDist::kUniform, 1.0};
  if (text.rfind("gamma:", 0) == 0) {
    const char* first = text.data() + 6;
    const char* last = text.data() + text.size();
    double shape = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, shape);
    if (ec == std::errc() && ptr == last && shape > 0.0) {
      return {WeightDist::kGamma, shape};
    }
  }
  throw std::invalid_argument("unknown weight distribution: " + text);
}

std::string weight_dist_name(WeightDist dist, double gamma_shape) {
  switch (dist) {
    case WeightDist::kConstant: return "const";
    case WeightDist::kExponential: return "exp";
    case WeightDist::kUniform: return "uniform";
    case WeightDist::kGamma: return "gamma:" + std::to_string(gamma_shape);
  }
  throw std::invalid_argument("unknown weight distribution enum");
}

double SiloConfig::weight_variance() const {
  switch (dist) {
    case WeightDist::kConstant: return 0.0;
    case WeightDist::kExponential: return 1.0;
    case WeightDist::kUniform: return 1.0 / 3.0;
    case WeightDist::kGamma: return 1.0 / gamma_shape;
  }
  throw std::invalid_argument("unknown weight distribution enum");
}

void SiloConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (dist == WeightDist::kGamma && !(gamma_shape > 0.0)) {
    throw std::invalid_argument("gamma shape must be positive");
  }
}

std::vector<double> mean_profile(int n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    w[static_cast<std::size_t>(i - 1)] = double(i) * double(n + 1 - i);
  }
  return w;
}

NoiseDraw sample_noise(const SiloConfig& cfg, RngStream& rng) {
  cfg.validate();
  NoiseDraw nz;
  sample_noise_into(cfg, rng, nz);
  return nz;
}

void sample_noise_into(const SiloConfig& cfg, RngStream& rng,
                       NoiseDraw& noise) {
  auto count = static_cast<std::size_t>(cfg.n);
  noise.u.resize(count);
  noise.v.resize(count);
  for (std::size_t i = 0; i < count; ++i) noise.u[i] = rng.uniform01();
  for (std::size_t i = 0; i < count; ++i) {
    switch (cfg.dist) {
      case WeightDist::kConstant:
        noise.v[i] = 1.0;
        break;
      case WeightDist::kExponential:
        noise.v[i] = rng.exponential(1.0);
        break;
      case WeightDist::kUniform:
        noise.v[i] = rng.uniform_open(2.0);
        break;
      case WeightDist::kGamma:
        noise.v[i] = rng.gamma(cfg.gamma_shape, 1.0 / cfg.gamma_shape);
        break;
    }
  }
}

SiloState step(const SiloState& state, const NoiseDraw& noise) {
  SiloState next;
  step_into(state, noise, next);
  return next;
}

void step_into(const SiloState& state, const NoiseDraw& noise,
               SiloState& next) {
  const std::size_t n = state.w.size();
  if (n == 0 || noise.u.size() != n || noise.v.size() != n) {
    throw std::invalid_argument("state and noise sizes disagree");
  }
  next.t = state.t + 1;
  next.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double from_right = (i + 1 < n) ? noise.u[i + 1] * state.w[i + 1] : 0.0;
    double from_left = (i > 0) ? (1.0 - noise.u[i - 1]) * state.w[i - 1] : 0.0;
    next.w[i] = noise.v[i] + from_right + from_left;
  }
}

}  // namespace qsilo
