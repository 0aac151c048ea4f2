#include "qsilo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsilo::stats {

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, (double(i) + 1.0) / n - f);
    d = std::max(d, f - double(i) / n);
  }
  return {d, ks_p_value(d, samples.size()), samples.size()};
}

double ks_p_value(double d, std::size_t n) {
  if (d <= 0.0) return 1.0;
  double sqrt_n = std::sqrt(double(n));
  double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  if (lambda < 0.3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double gamma2_cdf(double x, double rate) {
  if (x <= 0.0) return 0.0;
  double z = rate * x;
  return -std::expm1(-z + std::log1p(z));
}

double exponential_cdf(double x, double mean) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-x / mean);
}

double exponential_quantile(double p, double mean) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("quantile needs p in [0,1)");
  return -mean * std::log1p(-p);
}

namespace {

// Lower regularized gamma by series, for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by Lentz continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("reg_gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_cf(a, x), 0.0, 1.0);
}

double chi_square_p(double stat, int dof) {
  if (dof < 1) throw std::invalid_argument("dof must be positive");
  if (stat <= 0.0) return 1.0;
  return reg_gamma_q(0.5 * dof, 0.5 * stat);
}

MeanVar mean_var(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two samples");
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= double(xs.size());
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return {mean, ss / double(xs.size() - 1), xs.size()};
}

double batch_means_stderr(const std::vector<double>& xs, int batches) {
  if (batches < 2) throw std::invalid_argument("need at least two batches");
  std::size_t m = xs.size() / static_cast<std::size_t>(batches);
  if (m < 1) throw std::invalid_argument("series shorter than batch count");
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  for (int b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      sum += xs[static_cast<std::size_t>(b) * m + t];
    }
    means[static_cast<std::size_t>(b)] = sum / double(m);
  }
  MeanVar mv = mean_var(means);
  return std::sqrt(mv.var / double(batches));
}

double lag_autocorrelation(const std::vector<double>& xs, int lag) {
  if (lag < 1 || static_cast<std::size_t>(lag) >= xs.size()) {
    throw std::invalid_argument("lag out of range");
  }
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= double(xs.size());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    double d = xs[t] - mean;
    den += d * d;
    if (t + static_cast<std::size_t>(lag) < xs.size()) {
      num += d * (xs[t + static_cast<std::size_t>(lag)] - mean);
    }
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

Correlation correlation(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("correlation needs equal sizes >= 3");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  double denom = std::sqrt(sxx * syy);
  double r = (denom == 0.0) ? 0.0 : sxy / denom;
  return {r, 1.0 / std::sqrt(double(x.size())), x.size()};
}

ChiSquareResult chi_square_independence(
    const std::vector<double>& x, const std::vector<double>& y,
    const std::function<double(double)>& cdf_x,
    const std::function<double(double)>& cdf_y, int bins) {
  if (x.size() != y.size()) throw std::invalid_argument("size mismatch");
  if (bins < 2) throw std::invalid_argument("need at least two bins");
  std::size_t need = static_cast<std::size_t>(bins) *
                     static_cast<std::size_t>(bins) * 5;
  if (x.size() < need) {
    throw std::invalid_argument("too few samples for the bin count");
  }
  auto cell = [bins](double p) {
    int c = static_cast<int>(p * bins);
    return std::clamp(c, 0, bins - 1);
  };
  std::vector<long long> counts(
      static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    int cx = cell(cdf_x(x[i]));
    int cy = cell(cdf_y(y[i]));
    counts[static_cast<std::size_t>(cx) * static_cast<std::size_t>(bins) +
           static_cast<std::size_t>(cy)] += 1;
  }
  double expected = double(x.size()) / double(bins) / double(bins);
  double stat = 0.0;
  for (long long c : counts) {
    double d = double(c) - expected;
    stat += d * d / expected;
  }
  int dof = (bins - 1) * (bins - 1);
  return {stat, dof, chi_square_p(stat, dof)};
}

}  // namespace qsilo::stats
