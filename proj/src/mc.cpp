#include "qsilo/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qsilo/stats.hpp"

namespace qsilo::mc {

namespace {

double sum_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

}  // namespace

void McPlan::validate() const {
  cfg.validate();
  if (burn_in < 1) throw std::invalid_argument("burn_in must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  if (!(macro_r > 0.0) || !(macro_r < 1.0))
    throw std::invalid_argument("macro_r must lie in (0, 1)");
  if (window < 0) throw std::invalid_argument("window must be >= 0");
}

McPlan default_plan(const SiloConfig& cfg, std::int64_t samples) {
  cfg.validate();
  McPlan plan;
  plan.cfg = cfg;
  plan.burn_in = 20ll * cfg.n * cfg.n;
  plan.samples = samples;
  plan.thinning = std::max(1, cfg.n / 2);
  plan.replicas = 1;
  plan.macro_r = 0.5;
  plan.window = 2;
  return plan;
}

double SampleMatrix::at(std::int64_t row, std::size_t col) const {
  return values[static_cast<std::size_t>(row) * sites.size() + col];
}

std::size_t SampleMatrix::col_of(int site) const {
  for (std::size_t c = 0; c < sites.size(); ++c)
    if (sites[c] == site) return c;
  throw std::invalid_argument("site is outside the retained window");
}

std::vector<double> SampleMatrix::site_series(int site) const {
  std::size_t col = col_of(site);
  std::vector<double> out(static_cast<std::size_t>(rows));
  for (std::int64_t r = 0; r < rows; ++r)
    out[static_cast<std::size_t>(r)] = at(r, col);
  return out;
}

SampleMatrix run_stationary(const McPlan& plan) {
  plan.validate();
  const SiloConfig& cfg = plan.cfg;
  const int n = cfg.n;

  SampleMatrix m;
  m.n = n;
  m.center = std::clamp(static_cast<int>(plan.macro_r * n), 1, n);
  for (int s = std::max(1, m.center - plan.window);
       s <= std::min(n, m.center + plan.window); ++s)
    m.sites.push_back(s);
  m.rows = plan.samples;
  m.replicas = plan.replicas;
  m.values.resize(static_cast<std::size_t>(plan.samples) * m.sites.size());

  RngStream root(cfg.seed);
  const std::int64_t base = plan.samples / plan.replicas;
  const std::int64_t rem = plan.samples % plan.replicas;
  std::int64_t row = 0;
  SiloState state, next;
  NoiseDraw noise;
  for (std::int64_t k = 0; k < plan.replicas; ++k) {
    std::int64_t quota = base + (k < rem ? 1 : 0);
    if (quota == 0) continue;
    RngStream stream = root.child(static_cast<std::uint64_t>(k));
    state.t = 0;
    state.w = mean_profile(n);
    for (std::int64_t t = 0; t < plan.burn_in; ++t) {
      sample_noise_into(cfg, stream, noise);
      step_into(state, noise, next);
      state.w.swap(next.w);
      state.t = next.t;
    }
    for (std::int64_t s = 0; s < quota; ++s) {
      for (std::int64_t q = 0; q < plan.thinning; ++q) {
        sample_noise_into(cfg, stream, noise);
        bool check_balance = q + 1 == plan.thinning;
        double expected = 0.0;
        if (check_balance) {
          expected = sum_of(state.w) + sum_of(noise.v) -
                     noise.u.front() * state.w.front() -
                     (1.0 - noise.u.back()) * state.w.back();
        }
        step_into(state, noise, next);
        state.w.swap(next.w);
        state.t = next.t;
        if (check_balance) {
          double fresh = sum_of(state.w);
          if (std::abs(fresh - expected) >
              1e-9 * std::max(1.0, std::abs(expected)))
            throw std::logic_error("mass balance violated at retained layer");
        }
      }
      for (std::size_t c = 0; c < m.sites.size(); ++c)
        m.values[static_cast<std::size_t>(row) * m.sites.size() + c] =
            state.w[static_cast<std::size_t>(m.sites[c] - 1)];
      ++row;
    }
  }
  return m;
}

GammaFitReport gamma_fit_test(const std::vector<double>& scaled_samples,
                              double r, int n) {
  if (scaled_samples.size() < 100)
    throw std::invalid_argument("need at least 100 samples for the fit test");
  if (!(r > 0.0) || !(r < 1.0))
    throw std::invalid_argument("r must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("n must be >= 1");

  GammaFitReport report;
  report.n = n;
  report.r = r;
  report.rho = r * (1.0 - r);
  report.n_samples = static_cast<std::int64_t>(scaled_samples.size());
  stats::MeanVar mv = stats::mean_var(scaled_samples);
  report.mean = mv.mean;
  report.variance = mv.var;
  report.lag1_autocorr = stats::lag_autocorrelation(scaled_samples, 1);

  double rate = 2.0 / report.rho;
  stats::KsResult ks = stats::ks_test(
      scaled_samples, [rate](double x) { return stats::gamma2_cdf(x, rate); });
  report.ks_statistic = ks.statistic;
  report.p_value_valid = report.lag1_autocorr <= 0.2;
  report.p_value = report.p_value_valid
                       ? ks.p_value
                       : std::numeric_limits<double>::quiet_NaN();
  return report;
}

CovarianceEstimate covariance_estimate(const SampleMatrix& m, int i, int j) {
  std::size_t ci = m.col_of(i);
  std::size_t cj = m.col_of(j);
  if (m.rows < 2) throw std::invalid_argument("need at least two rows");

  double mean_i = 0.0, mean_j = 0.0;
  for (std::int64_t r = 0; r < m.rows; ++r) {
    mean_i += m.at(r, ci);
    mean_j += m.at(r, cj);
  }
  mean_i /= double(m.rows);
  mean_j /= double(m.rows);

  std::vector<double> products(static_cast<std::size_t>(m.rows));
  for (std::int64_t r = 0; r < m.rows; ++r)
    products[static_cast<std::size_t>(r)] =
        (m.at(r, ci) - mean_i) * (m.at(r, cj) - mean_j);

  double unbias = double(m.rows) / double(m.rows - 1);
  CovarianceEstimate est;
  est.i = i;
  est.j = j;
  est.n = m.rows;
  est.value = unbias * sum_of(products) / double(m.rows);
  est.std_error = unbias * stats::batch_means_stderr(products);
  return est;
}

CoupledPair run_coupled(const McPlan& plan, const SiloState& x0,
                        const SiloState& y0) {
  plan.validate();
  const SiloConfig& cfg = plan.cfg;
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  if (x0.w.size() != n || y0.w.size() != n)
    throw std::invalid_argument("state sizes must match cfg.n");
  for (std::size_t i = 0; i < n; ++i)
    if (!(x0.w[i] >= y0.w[i]))
      throw std::invalid_argument("x0 must dominate y0 componentwise");

  CoupledPair pair;
  pair.x = x0;
  pair.y = y0;
  pair.d_history.reserve(static_cast<std::size_t>(plan.samples) + 1);

  double gap_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) gap_sum += pair.x.w[i] - pair.y.w[i];
  double d = gap_sum / double(cfg.n);
  pair.d_history.push_back(d);
  const double d0_scale = std::max(1.0, d);

  RngStream rng(cfg.seed);
  NoiseDraw noise;
  SiloState nx, ny;
  for (std::int64_t t = 0; t < plan.samples; ++t) {
    sample_noise_into(cfg, rng, noise);
    double loss = noise.u.front() * (pair.x.w.front() - pair.y.w.front()) +
                  (1.0 - noise.u.back()) * (pair.x.w.back() - pair.y.w.back());
    step_into(pair.x, noise, nx);
    step_into(pair.y, noise, ny);
    pair.x.w.swap(nx.w);
    pair.x.t = nx.t;
    pair.y.w.swap(ny.w);
    pair.y.t = ny.t;

    gap_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double g = pair.x.w[i] - pair.y.w[i];
      if (!(g >= 0.0))
        throw std::logic_error("coupling lost componentwise ordering");
      gap_sum += g;
    }
    d -= loss / double(cfg.n);
    if (std::abs(d - gap_sum / double(cfg.n)) > 1e-10 * d0_scale)
      throw std::logic_error("gap recursion drifted from the summed gap");
    pair.d_history.push_back(d);
  }
  return pair;
}

}  // namespace qsilo::mc
