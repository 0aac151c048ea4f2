#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qsilo::stats {

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
};

/**
 * One-sample Kolmogorov-Smirnov test against a continuous CDF.  The
 * p-value uses the asymptotic Kolmogorov tail with Stephens' finite-n
 * adjustment, accurate to a few percent already at n around 100.
 */
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

/** Tail probability for a raw KS statistic d at sample size n. */
double ks_p_value(double d, std::size_t n);

/** CDF of the shape-2 gamma law: F(x) = 1 - exp(-rate*x)*(1 + rate*x). */
double gamma2_cdf(double x, double rate);

/** CDF of the exponential law with the given mean. */
double exponential_cdf(double x, double mean);

/** Quantile of the exponential law with the given mean. */
double exponential_quantile(double p, double mean);

/** Regularized upper incomplete gamma Q(a, x), for chi-square tails. */
double reg_gamma_q(double a, double x);

/** Upper tail of the chi-square law with dof degrees of freedom. */
double chi_square_p(double stat, int dof);

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
};

MeanVar mean_var(const std::vector<double>& xs);

/**
 * Standard error of the series mean by the method of batch means: the
 * series is cut into `batches` equal blocks and the spread of the block
 * means estimates the variance of the overall mean, which stays honest
 * under serial dependence where the iid formula does not.
 */
double batch_means_stderr(const std::vector<double>& xs, int batches = 50);

/** Sample autocorrelation of xs at the given positive lag. */
double lag_autocorrelation(const std::vector<double>& xs, int lag);

struct Correlation {
  double r = 0.0;
  double se = 0.0;  // large-sample 1/sqrt(n)
  std::size_t n = 0;
};

Correlation correlation(const std::vector<double>& x,
                        const std::vector<double>& y);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/**
 * Independence test on equiprobable bins: each coordinate is mapped
 * through its marginal CDF and cut into `bins` equal probability cells,
 * giving a bins x bins contingency table with expected count n/bins^2
 * per cell and (bins-1)^2 degrees of freedom.  Unlike a correlation
 * check this is sensitive to nonlinear dependence.
 */
ChiSquareResult chi_square_independence(
    const std::vector<double>& x, const std::vector<double>& y,
    const std::function<double(double)>& cdf_x,
    const std::function<double(double)>& cdf_y, int bins = 10);

}  // namespace qsilo::stats
