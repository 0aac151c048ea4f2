#include "qsilo/ism.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qsilo::ism {

namespace {

void require_ring(int l, double rho) {
  if (l < 2 || l % 2 != 0)
    throw std::invalid_argument("ring size must be even and at least 2");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
}

}  // namespace

RingState make_gamma_ring(int l, double rho, RngStream& rng) {
  require_ring(l, rho);
  RingState state;
  state.l = l;
  state.rho = rho;
  state.eta.resize(static_cast<std::size_t>(l));
  for (auto& x : state.eta) x = rng.gamma2_mean(rho);
  return state;
}

double ring_mass(const RingState& state) {
  double sum = 0.0;
  for (double x : state.eta) sum += x;
  return sum;
}

void ism_step(RingState& state, const std::vector<double>& u) {
  int l = state.l;
  if (l < 2 || l % 2 != 0)
    throw std::invalid_argument("ring size must be even and at least 2");
  if (u.size() != static_cast<std::size_t>(l) ||
      state.eta.size() != static_cast<std::size_t>(l))
    throw std::invalid_argument("need one uniform per site");
  double before = ring_mass(state);
  thread_local std::vector<double> next;
  next.assign(static_cast<std::size_t>(l), 0.0);
  for (int i = 0; i < l; ++i) {
    int left = i == 0 ? l - 1 : i - 1;
    int right = i == l - 1 ? 0 : i + 1;
    next[static_cast<std::size_t>(i)] =
        state.eta[static_cast<std::size_t>(left)] *
            u[static_cast<std::size_t>(left)] +
        state.eta[static_cast<std::size_t>(right)] *
            (1.0 - u[static_cast<std::size_t>(right)]);
  }
  state.eta.swap(next);
  ++state.t;
  double after = ring_mass(state);
  if (std::abs(after - before) > 1e-12 * std::max(1.0, std::abs(before)))
    throw std::logic_error("mass conservation violated by a ring step");
}

void ism_step(RingState& state, RngStream& rng) {
  thread_local std::vector<double> u;
  u.resize(static_cast<std::size_t>(state.l));
  for (auto& x : u) x = rng.uniform01();
  ism_step(state, u);
}

InvarianceReport gamma_invariance_test(int l, double rho, std::int64_t steps,
                                       std::int64_t samples, RngStream& rng) {
  require_ring(l, rho);
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (samples < 1 || samples * l < 100)
    throw std::invalid_argument("insufficient samples: pool needs >= 100");

  std::size_t ls = static_cast<std::size_t>(l);
  std::vector<double> pool;
  pool.reserve(static_cast<std::size_t>(samples) * ls);
  InvarianceReport report;
  report.pooled = samples * l;
  for (std::int64_t s = 0; s < samples; ++s) {
    RngStream stream = rng.child(static_cast<std::uint64_t>(s));
    RingState ring = make_gamma_ring(l, rho, stream);
    double mass0 = ring_mass(ring);
    for (std::int64_t t = 0; t < steps; ++t) ism_step(ring, stream);
    double drift = std::abs(ring_mass(ring) - mass0) /
                   std::max(1.0, std::abs(mass0));
    report.mass_drift = std::max(report.mass_drift, drift);
    pool.insert(pool.end(), ring.eta.begin(), ring.eta.end());
  }

  double grand = 0.0;
  for (double x : pool) grand += x;
  grand /= double(pool.size());

  // Replica averages are iid, so their spread gives honest errors even
  // though sites inside one replica share a trajectory.
  auto replica_stats = [&](auto&& site_value) {
    double m = 0.0, m2 = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
      const double* eta = pool.data() + static_cast<std::size_t>(s) * ls;
      double avg = 0.0;
      for (int i = 0; i < l; ++i) avg += site_value(eta, i);
      avg /= double(l);
      double d = avg - m;
      m += d / double(s + 1);
      m2 += d * (avg - m);
    }
    double se = samples > 1
                    ? std::sqrt(m2 / (double(samples) * double(samples - 1)))
                    : 0.0;
    return std::pair<double, double>(m, se);
  };

  std::tie(report.mean, report.mean_se) =
      replica_stats([](const double* eta, int i) { return eta[i]; });
  std::tie(report.variance, report.variance_se) =
      replica_stats([&](const double* eta, int i) {
        double d = eta[i] - grand;
        return d * d;
      });
  std::tie(report.pair_cov, report.pair_cov_se) =
      replica_stats([&](const double* eta, int i) {
        return (eta[i] - grand) * (eta[(i + 2) % l] - grand);
      });
  std::tie(report.cross_cov, report.cross_cov_se) =
      replica_stats([&](const double* eta, int i) {
        return (eta[i] - grand) * (eta[(i + 1) % l] - grand);
      });

  double rate = 2.0 / rho;
  report.ks = stats::ks_test(std::move(pool), [rate](double x) {
    return stats::gamma2_cdf(x, rate);
  });
  return report;
}

double eval_observable(const CylinderObservable& o, const RingState& state) {
  std::size_t ls = state.eta.size();
  std::size_t a = static_cast<std::size_t>(((o.site % state.l) + state.l) %
                                           state.l);
  switch (o.kind) {
    case CylinderObservable::Kind::kSite:
      return state.eta[a];
    case CylinderObservable::Kind::kPairProduct:
      return state.eta[a] * state.eta[(a + 2) % ls];
    case CylinderObservable::Kind::kThreshold:
      return state.eta[a] > o.threshold ? 1.0 : 0.0;
  }
  return 0.0;
}

std::vector<ReversibilityRow> reversibility_test(
    int l, double rho,
    const std::vector<std::pair<CylinderObservable, CylinderObservable>>&
        pairs,
    std::int64_t n_pairs, RngStream& rng) {
  require_ring(l, rho);
  if (n_pairs < 2) throw std::invalid_argument("need at least two pairs");

  std::vector<double> mean(pairs.size(), 0.0), m2(pairs.size(), 0.0);
  RingState eta0;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    eta0 = make_gamma_ring(l, rho, rng);
    RingState eta1 = eta0;
    ism_step(eta1, rng);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& [f, g] = pairs[p];
      double d = eval_observable(f, eta0) * eval_observable(g, eta1) -
                 eval_observable(g, eta0) * eval_observable(f, eta1);
      double delta = d - mean[p];
      mean[p] += delta / double(k + 1);
      m2[p] += delta * (d - mean[p]);
    }
  }

  std::vector<ReversibilityRow> rows(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    rows[p].difference = mean[p];
    rows[p].std_error =
        std::sqrt(m2[p] / (double(n_pairs) * double(n_pairs - 1)));
    rows[p].n_pairs = n_pairs;
  }
  return rows;
}

SplittingReport splitting_lemma_test(double rho, std::int64_t n_samples,
                                     RngStream& rng) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (n_samples < 500)
    throw std::invalid_argument("insufficient samples: need >= 500");

  std::size_t n = static_cast<std::size_t>(n_samples);
  std::vector<double> first(n), second(n);
  double half = rho / 2.0;
  double mean_first = 0.0, mean_product = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double w = rng.exponential(half) + rng.exponential(half);
    double u = rng.uniform01();
    first[k] = u * w;
    second[k] = (1.0 - u) * w;
    mean_first += first[k];
    mean_product += first[k] * second[k];
  }

  SplittingReport report;
  report.n = n_samples;
  report.mean_first = mean_first / double(n);
  report.mean_product = mean_product / double(n);
  auto cdf = [half](double x) { return stats::exponential_cdf(x, half); };
  report.corr = stats::correlation(first, second);
  report.independence = stats::chi_square_independence(first, second, cdf, cdf);
  report.ks_first = stats::ks_test(std::move(first), cdf);
  report.ks_second = stats::ks_test(std::move(second), cdf);
  return report;
}

}  // namespace qsilo::ism
