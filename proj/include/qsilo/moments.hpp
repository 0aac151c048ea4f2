#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qsilo::moments {

/**
 * Exact stationary second moments of the silo column.
 *
 * Parity splits the lattice: sites i and j are correlated only when i+j
 * is even, so sigma and R are stored on pairs (i, j) with 1 <= i <= j <= n
 * and i+j even.  Accessors resolve the other index orders by symmetry,
 * return 0 for odd-parity pairs, and return 0 for R whenever an index
 * sits on the absorbing boundary {0, n+1}.
 *
 * The transform R(i,i) = w(i)^2 - 2*sigma(i,i), R(i,j) = -3*sigma(i,j)
 * for i != j turns the covariance balance into a linear system driven by
 * the source K on the diagonal:
 *
 *   R(i,j) = K(i)*1{i=j} + sum over kernel moves of R at the new pair,
 *
 * where the kernel moves both indices one site diagonally: off the
 * diagonal each of the four corners (i+-1, j+-1) has weight 1/4; on the
 * diagonal the two sliding moves (i+-1, i+-1) have weight 1/3 and the two
 * splitting moves (i+-1, i-+1) have weight 1/6.
 */
class MomentField {
 public:
  MomentField(int n, double alpha);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<double>& k() const { return k_; }

  /** Mean profile value with zero boundary extension. */
  double w_at(int i) const {
    return (i < 1 || i > n_) ? 0.0 : w_[static_cast<std::size_t>(i - 1)];
  }

  double r(int i, int j) const;
  double sigma(int i, int j) const;

  void set_r(int i, int j, double value);

  /** Recompute all sigma values from R through the inverse transform. */
  void sync_sigma_from_r();

  /** Direct mutable access in stored pair order, for solvers. */
  std::vector<double>& r_values() { return r_; }
  const std::vector<double>& r_values() const { return r_; }

  std::size_t pair_count() const { return r_.size(); }
  std::pair<int, int> pair_at(std::size_t idx) const { return pairs_[idx]; }

 private:
  std::size_t index_of(int i, int j) const;

  int n_;
  double alpha_;
  std::vector<double> w_;
  std::vector<double> k_;
  std::vector<double> r_;
  std::vector<double> sigma_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::size_t> row_base_;
};

/** Thrown when the fixed-point solver runs out of iterations. */
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/** Diagonal source: K(i) = 6i(n+1-i) - (n+1)^2 - (1+2*alpha), i in 1..n. */
std::vector<double> source_K(int n, double alpha);

struct SolveReport {
  long long iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/**
 * Gauss-Seidel fixed-point solve of the R system, sweeping stored pairs
 * in lexicographic order from a zero start.
 *
 * The reported residual is ||R - (K*diag + P*R)||_inf divided by
 * max(1, ||K||_inf).  The scaling keeps the stopping rule meaningful as n
 * grows: K and R grow like n^2 and n^3, so the raw residual of the exact
 * solution already sits near machine_epsilon * n^3 and a fixed absolute
 * threshold would be unreachable for large n.  For n <= 2 the divisor is
 * at most 2 and the rule is effectively absolute.
 *
 * max_iters <= 0 selects the default of 1e6 * max(1, ln n) sweeps.
 * Throws NonConvergence if the tolerance is not reached.
 */
MomentField solve_R_fixed_point(int n, double alpha, double tol = 1e-12,
                                long long max_iters = 0,
                                SolveReport* report = nullptr);

/**
 * Sparse direct solve of the same system; residual at machine precision.
 * Pair count grows like n^2/4, so n is capped at 512 to bound memory.
 * Throws std::length_error beyond the cap.
 */
MomentField solve_R_direct(int n, double alpha);

/**
 * Scale-normalized residual of the original covariance balance evaluated
 * directly on sigma: diagonal rows, the dedicated distance-2 rows on both
 * sides, and plain four-corner averaging at distance > 2.  References to
 * sites 0 or n+1 read as 0.  Each row residual is divided by
 * max(1, |lhs| + sum |rhs terms|) and the maximum over rows is returned,
 * so a correct field scores near machine epsilon at every n while a
 * corrupted entry scores order 1.
 *
 * This check never goes through the R transform, so it independently
 * validates both the transform and the solver.
 */
double covariance_residual(const MomentField& field);

/** The solver-side residual norm of a field, same scaling as the solver. */
double r_system_residual(const MomentField& field);

}  // namespace qsilo::moments
