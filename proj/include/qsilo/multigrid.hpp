#pragma once

#include <vector>

#include "qsilo/moments.hpp"

namespace qsilo::mg {

/**
 * Geometric multigrid for the scaled second-moment system at large n.
 *
 * Unknown is r(i,j) = R(i,j)/(n+1)^3 on the square grid {0..n+1}^2 with
 * zero Dirichlet boundary and mesh width h = 1/(n+1).  Rows are scaled to
 * Laplacian strength so the same discretization is valid on every level:
 *
 *   off-diagonal:  (2/h^2) * (r(i,j) - 1/4 * sum of diagonal neighbors) = 0
 *   diagonal:      (3/h^2) * (r(i,i) - 1/3 * (r(i-1,i-1)+r(i+1,i+1))
 *                           - 1/6 * (r(i+1,i-1)+r(i-1,i+1)))
 *                  = (3/h) * (6 x_i (1-x_i) - 1 - (1+2*alpha) h^2)
 *
 * with x_i = i*h.  Multiplying the rows back by h^2/2 and h^2/3 recovers
 * the pair fixed-point equations exactly, so the converged grid equals
 * R/(n+1)^3 with no discretization gap.
 *
 * The stencil only couples sites of equal i+j parity, and all the action
 * lives on the even class (the odd class has zero source and zero
 * solution).  In the 45-degree rotated coordinates u = (i+j)/2,
 * v = (i-j)/2 the even class is an ordinary integer grid and coarse
 * grids nest exactly two-to-one, so the cycle uses the textbook parts:
 * red-black Gauss-Seidel sweeps colored by the parity of i, full
 * weighting of residuals, and bilinear interpolation of corrections, all
 * expressed in the rotated frame.
 *
 * Grids live on n values with n+1 a power of two; anything else is
 * rejected at construction.  Coarsening halves n+1 until at most three
 * interior points remain; that level is solved exactly by sweeping.
 */
class GridHierarchy {
 public:
  GridHierarchy(int n, double alpha);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  int levels() const { return static_cast<int>(grids_.size()); }

  /** Scaled solution value, zero outside the interior. */
  double r_at(int i, int j) const;

  /**
   * One V-cycle with nu_pre and nu_post red-black sweeps around the
   * coarse-grid correction.  Returns the raw finest-level residual
   * infinity norm afterwards.
   */
  double vcycle(int nu_pre = 2, int nu_post = 2);

  /**
   * Runs V(2,2) cycles until the normwise backward error drops to tol or
   * the cycle budget is spent; returns the final backward error.
   */
  double solve(double tol = 1e-12, int max_cycles = 50);

  /** Raw finest-level residual infinity norm. */
  double residual_inf() const;

  /**
   * One finest-level relaxation pass over the given color (parity of i).
   * Each colored point reads only the other color, so repeating a pass
   * with unchanged inputs must reproduce the values bit for bit.
   */
  void sweep_finest(int color);

  /**
   * Normwise backward error ||f - A r||_inf / (||A||_inf * ||r||_inf +
   * ||f||_inf).  This is the standard measure of how close a computed
   * solution is to machine precision: row scales grow like (n+1)^2, so a
   * raw residual threshold would tighten quadratically with n for no
   * accuracy gain.
   */
  double backward_error() const;

  /** Copies the solution into a pair field (R = (n+1)^3 r) with sigma. */
  moments::MomentField to_field() const;

 private:
  struct Level {
    int n = 0;
    double h = 0.0;
    std::vector<double> u;  // (n+2)^2 row-major solution / correction
    std::vector<double> f;  // right-hand side, same layout
    std::vector<double> scratch;
  };

  void sweep_color(Level& lv, int color) const;
  void smooth(Level& lv, int sweeps) const;
  void residual(const Level& lv, std::vector<double>& out) const;
  void restrict_to(const std::vector<double>& fine_res, Level& coarse) const;
  void prolong_add(const Level& coarse, Level& fine) const;
  void solve_coarsest(Level& lv) const;
  void cycle(std::size_t depth, int nu_pre, int nu_post);

  int n_;
  double alpha_;
  std::vector<Level> grids_;
};

/**
 * Diagonal section r(x,x) at x = i/(n+1) for i = 0..n+1, endpoints
 * included (they are exactly zero).
 */
std::vector<double> diagonal_profile(const GridHierarchy& g);

struct CornerPoint {
  int n = 0;
  double value = 0.0;  // R(1,1)/(n+1)^2 = (n+1) * r(1,1)
};

/** Solves each listed n and tabulates the normalized corner value. */
std::vector<CornerPoint> corner_series(const std::vector<int>& n_list,
                                       double alpha, double tol = 1e-12);

}  // namespace qsilo::mg
