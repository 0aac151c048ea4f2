#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qsilo/rng.hpp"
#include "qsilo/stats.hpp"

namespace qsilo::ism {

/**
 * Bulk limit of the silo on a periodic ring of even size.  Each layer
 * redistributes every site's mass to its two neighbors according to a
 * fresh uniform split, with no injection and no absorption, so total
 * mass is conserved exactly:
 *
 *   eta'(i) = eta(i-1) u(i-1) + eta(i+1) (1 - u(i+1)),  indices mod L.
 *
 * The product measure with shape-2 gamma marginals of mean rho (rate
 * 2/rho) is invariant and reversible for this update; the routines
 * below exercise that claim and the uniform-splitting identity it
 * rests on.  Even L keeps the two site parities aligned under wrap.
 */
struct RingState {
  int l = 0;
  double rho = 0.0;
  std::int64_t t = 0;
  std::vector<double> eta;
};

/** Ring of iid shape-2 gamma sites with mean rho.  Consumes two
 * exponential draws per site, sites in increasing order. */
RingState make_gamma_ring(int l, double rho, RngStream& rng);

/** Total mass of the configuration. */
double ring_mass(const RingState& state);

/**
 * Advances one layer with the supplied uniforms (one per site).
 * Throws if L is odd or the uniform count differs from L.  Mass
 * conservation is asserted on every call; a violation beyond rounding
 * is a logic error.
 */
void ism_step(RingState& state, const std::vector<double>& u);

/** Draws the L uniforms from rng (ascending site order) and steps. */
void ism_step(RingState& state, RngStream& rng);

/** Pooled-marginal statistics of the evolved ensemble. */
struct InvarianceReport {
  std::int64_t pooled = 0;       // samples * l values entering the pool
  double mean = 0.0;             // pooled site mean, target rho
  double mean_se = 0.0;
  double variance = 0.0;         // pooled site variance, target rho^2/2
  double variance_se = 0.0;
  stats::KsResult ks;            // pooled sites against the gamma target
  double pair_cov = 0.0;         // nearest same-parity covariance, target 0
  double pair_cov_se = 0.0;
  double cross_cov = 0.0;        // adjacent opposite-parity covariance
  double cross_cov_se = 0.0;
  double mass_drift = 0.0;       // worst relative drift over replicas
};

/**
 * Runs `samples` independent replicas, each initialized from the gamma
 * product and advanced `steps` layers, and pools the final
 * configurations.  Per-replica child streams make the result
 * independent of replica order.  Throws when the pool would hold
 * fewer than 100 values.
 */
InvarianceReport gamma_invariance_test(int l, double rho, std::int64_t steps,
                                       std::int64_t samples, RngStream& rng);

/** Cylinder observables for the reversibility check. */
struct CylinderObservable {
  enum class Kind { kSite, kPairProduct, kThreshold };
  Kind kind = Kind::kSite;
  int site = 0;          // kPairProduct also reads site+2
  double threshold = 0.0;  // kThreshold only
};

double eval_observable(const CylinderObservable& o, const RingState& state);

struct ReversibilityRow {
  double difference = 0.0;  // mean of f(eta0) g(eta1) - g(eta0) f(eta1)
  double std_error = 0.0;
  std::int64_t n_pairs = 0;
};

/**
 * Estimates E[f(eta0) g(eta1)] - E[g(eta0) f(eta1)] for each listed
 * pair, with eta0 drawn from the gamma product and eta1 one layer
 * later.  Both orderings are evaluated on the same draw, so the
 * difference has mean zero in law and exactly zero when f = g.
 */
std::vector<ReversibilityRow> reversibility_test(
    int l, double rho,
    const std::vector<std::pair<CylinderObservable, CylinderObservable>>&
        pairs,
    std::int64_t n_pairs, RngStream& rng);

/** Split statistics of W = E1 + E2 against two independent
 * exponentials: U W and (1-U) W with U uniform. */
struct SplittingReport {
  std::int64_t n = 0;
  double mean_first = 0.0;     // mean of U W, target rho/2
  double mean_product = 0.0;   // mean of U W (1-U) W, target rho^2/4
  stats::KsResult ks_first;    // U W against exponential(rho/2)
  stats::KsResult ks_second;   // (1-U) W against exponential(rho/2)
  stats::Correlation corr;     // target 0
  stats::ChiSquareResult independence;  // 10x10 equiprobable cells
};

/**
 * Draws n_samples triples (E1, E2, U), forms the two split halves, and
 * tests each half against the exponential marginal plus the pair
 * against independence.  Throws below 500 samples (the contingency
 * table needs five expected counts per cell).
 */
SplittingReport splitting_lemma_test(double rho, std::int64_t n_samples,
                                     RngStream& rng);

}  // namespace qsilo::ism
