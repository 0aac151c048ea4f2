#include "qsilo/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsilo::mg {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline std::size_t at(int stride, int i, int j) {
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(stride) +
         static_cast<std::size_t>(j);
}

}  // namespace

GridHierarchy::GridHierarchy(int n, double alpha) : n_(n), alpha_(alpha) {
  if (n < 1 || !power_of_two(n + 1)) {
    throw std::invalid_argument(
        "multigrid needs n+1 to be a power of two, got n = " +
        std::to_string(n));
  }
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  int level_n = n;
  for (;;) {
    Level lv;
    lv.n = level_n;
    lv.h = 1.0 / double(level_n + 1);
    auto cells = static_cast<std::size_t>(level_n + 2) *
                 static_cast<std::size_t>(level_n + 2);
    lv.u.assign(cells, 0.0);
    lv.f.assign(cells, 0.0);
    lv.scratch.assign(cells, 0.0);
    grids_.push_back(std::move(lv));
    if (level_n <= 3) break;
    level_n = (level_n + 1) / 2 - 1;
  }
  Level& top = grids_.front();
  int stride = top.n + 2;
  for (int i = 1; i <= top.n; ++i) {
    double x = i * top.h;
    top.f[at(stride, i, i)] =
        (3.0 / top.h) *
        (6.0 * x * (1.0 - x) - 1.0 - (1.0 + 2.0 * alpha_) * top.h * top.h);
  }
}

double GridHierarchy::r_at(int i, int j) const {
  if (i < 0 || j < 0 || i > n_ + 1 || j > n_ + 1) return 0.0;
  return grids_.front().u[at(n_ + 2, i, j)];
}

void GridHierarchy::sweep_color(Level& lv, int color) const {
  const int n = lv.n;
  const int stride = n + 2;
  const double h2 = lv.h * lv.h;
  for (int i = 1; i <= n; ++i) {
    if (i % 2 != color) continue;
    // Same parity for j keeps i+j even.
    int j0 = (i % 2 == 0) ? 2 : 1;
    for (int j = j0; j <= n; j += 2) {
      double nw = lv.u[at(stride, i - 1, j - 1)];
      double ne = lv.u[at(stride, i - 1, j + 1)];
      double sw = lv.u[at(stride, i + 1, j - 1)];
      double se = lv.u[at(stride, i + 1, j + 1)];
      double& out = lv.u[at(stride, i, j)];
      if (i == j) {
        out = lv.f[at(stride, i, j)] * h2 / 3.0 + (nw + se) / 3.0 +
              (ne + sw) / 6.0;
      } else {
        out = lv.f[at(stride, i, j)] * h2 / 2.0 + 0.25 * (nw + ne + sw + se);
      }
    }
  }
}

void GridHierarchy::smooth(Level& lv, int sweeps) const {
  for (int s = 0; s < sweeps; ++s) {
    sweep_color(lv, 1);
    sweep_color(lv, 0);
  }
}

void GridHierarchy::residual(const Level& lv, std::vector<double>& out) const {
  const int n = lv.n;
  const int stride = n + 2;
  const double h2 = lv.h * lv.h;
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 1; i <= n; ++i) {
    int j0 = (i % 2 == 0) ? 2 : 1;
    for (int j = j0; j <= n; j += 2) {
      double nw = lv.u[at(stride, i - 1, j - 1)];
      double ne = lv.u[at(stride, i - 1, j + 1)];
      double sw = lv.u[at(stride, i + 1, j - 1)];
      double se = lv.u[at(stride, i + 1, j + 1)];
      double center = lv.u[at(stride, i, j)];
      double applied;
      if (i == j) {
        applied = (3.0 / h2) *
                  (center - (nw + se) / 3.0 - (ne + sw) / 6.0);
      } else {
        applied = (2.0 / h2) * (center - 0.25 * (nw + ne + sw + se));
      }
      out[at(stride, i, j)] = lv.f[at(stride, i, j)] - applied;
    }
  }
}

void GridHierarchy::restrict_to(const std::vector<double>& fine_res,
                                Level& coarse) const {
  // Full weighting on the rotated lattice: the nine stencil points around
  // the fine partner (2I, 2J) are its rotated-frame center, edge and
  // corner neighbors, all of the same i+j parity class.
  const int nc = coarse.n;
  const int nf = 2 * nc + 1;
  const int cs = nc + 2;
  const int fs = nf + 2;
  std::fill(coarse.f.begin(), coarse.f.end(), 0.0);
  for (int bi = 1; bi <= nc; ++bi) {
    int j0 = (bi % 2 == 0) ? 2 : 1;
    for (int bj = j0; bj <= nc; bj += 2) {
      int a = 2 * bi;
      int b = 2 * bj;
      double value =
          0.25 * fine_res[at(fs, a, b)] +
          0.125 * (fine_res[at(fs, a - 1, b - 1)] +
                   fine_res[at(fs, a - 1, b + 1)] +
                   fine_res[at(fs, a + 1, b - 1)] +
                   fine_res[at(fs, a + 1, b + 1)]) +
          0.0625 * (fine_res[at(fs, a - 2, b)] + fine_res[at(fs, a + 2, b)] +
                    fine_res[at(fs, a, b - 2)] + fine_res[at(fs, a, b + 2)]);
      coarse.f[at(cs, bi, bj)] = value;
    }
  }
}

void GridHierarchy::prolong_add(const Level& coarse, Level& fine) const {
  // Bilinear interpolation on the rotated lattice.  A fine point either
  // coincides with a coarse point, sits on a rotated edge between two, or
  // sits at the center of a rotated cell of four.
  const int nf = fine.n;
  const int nc = coarse.n;
  const int fs = nf + 2;
  const int cs = nc + 2;
  auto ev = [&](int bi, int bj) -> double {
    if (bi < 0 || bj < 0 || bi > nc + 1 || bj > nc + 1) return 0.0;
    return coarse.u[at(cs, bi, bj)];
  };
  for (int i = 1; i <= nf; ++i) {
    int j0 = (i % 2 == 0) ? 2 : 1;
    for (int j = j0; j <= nf; j += 2) {
      double add;
      if (i % 2 == 0) {
        int a = i / 2;
        int b = j / 2;
        if ((a + b) % 2 == 0) {
          add = ev(a, b);
        } else {
          add = 0.25 * (ev(a - 1, b) + ev(a + 1, b) + ev(a, b - 1) +
                        ev(a, b + 1));
        }
      } else if ((i + j) % 4 == 2) {
        add = 0.5 * (ev((i + 1) / 2, (j + 1) / 2) +
                     ev((i - 1) / 2, (j - 1) / 2));
      } else {
        add = 0.5 * (ev((i + 1) / 2, (j - 1) / 2) +
                     ev((i - 1) / 2, (j + 1) / 2));
      }
      fine.u[at(fs, i, j)] += add;
    }
  }
}

void GridHierarchy::solve_coarsest(Level& lv) const {
  double fmax = 0.0;
  for (double v : lv.f) fmax = std::max(fmax, std::abs(v));
  std::vector<double> res(lv.u.size());
  for (int s = 0; s < 500; ++s) {
    sweep_color(lv, 1);
    sweep_color(lv, 0);
    residual(lv, res);
    double rmax = 0.0;
    for (double v : res) rmax = std::max(rmax, std::abs(v));
    if (rmax <= 1e-14 * std::max(fmax, 1.0)) break;
  }
}

void GridHierarchy::cycle(std::size_t depth, int nu_pre, int nu_post) {
  Level& lv = grids_[depth];
  if (depth + 1 == grids_.size()) {
    solve_coarsest(lv);
    return;
  }
  Level& next = grids_[depth + 1];
  smooth(lv, nu_pre);
  residual(lv, lv.scratch);
  restrict_to(lv.scratch, next);
  std::fill(next.u.begin(), next.u.end(), 0.0);
  cycle(depth + 1, nu_pre, nu_post);
  prolong_add(next, lv);
  smooth(lv, nu_post);
}

double GridHierarchy::vcycle(int nu_pre, int nu_post) {
  if (nu_pre < 0 || nu_post < 0 || nu_pre + nu_post == 0) {
    throw std::invalid_argument("cycle needs at least one sweep");
  }
  cycle(0, nu_pre, nu_post);
  return residual_inf();
}

void GridHierarchy::sweep_finest(int color) {
  if (color != 0 && color != 1) {
    throw std::invalid_argument("color must be 0 or 1");
  }
  sweep_color(grids_.front(), color);
}

double GridHierarchy::residual_inf() const {
  const Level& top = grids_.front();
  std::vector<double> res(top.u.size());
  residual(top, res);
  double rmax = 0.0;
  for (double v : res) rmax = std::max(rmax, std::abs(v));
  return rmax;
}

double GridHierarchy::backward_error() const {
  const Level& top = grids_.front();
  double umax = 0.0;
  for (double v : top.u) umax = std::max(umax, std::abs(v));
  double fmax = 0.0;
  for (double v : top.f) fmax = std::max(fmax, std::abs(v));
  // Largest absolute row sum: the diagonal rows carry (3/h^2)(1 + 1/3*2
  // + 1/6*2) = 6/h^2.
  double anorm = 6.0 / (top.h * top.h);
  return residual_inf() / (anorm * umax + fmax);
}

double GridHierarchy::solve(double tol, int max_cycles) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  double err = backward_error();
  for (int c = 0; c < max_cycles; ++c) {
    vcycle(2, 2);
    err = backward_error();
    if (err <= tol) return err;
  }
  throw moments::NonConvergence(
      "multigrid did not reach tol " + std::to_string(tol) + " in " +
          std::to_string(max_cycles) + " cycles",
      err);
}

moments::MomentField GridHierarchy::to_field() const {
  moments::MomentField field(n_, alpha_);
  double cube = double(n_ + 1) * double(n_ + 1) * double(n_ + 1);
  for (int i = 1; i <= n_; ++i) {
    for (int j = i; j <= n_; j += 2) {
      field.set_r(i, j, cube * r_at(i, j));
    }
  }
  field.sync_sigma_from_r();
  return field;
}

std::vector<double> diagonal_profile(const GridHierarchy& g) {
  std::vector<double> p(static_cast<std::size_t>(g.n()) + 2, 0.0);
  for (int i = 0; i <= g.n() + 1; ++i) {
    p[static_cast<std::size_t>(i)] = g.r_at(i, i);
  }
  return p;
}

std::vector<CornerPoint> corner_series(const std::vector<int>& n_list,
                                       double alpha, double tol) {
  std::vector<CornerPoint> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    GridHierarchy g(n, alpha);
    g.solve(tol);
    out.push_back({n, double(n + 1) * g.r_at(1, 1)});
  }
  return out;
}

}  // namespace qsilo::mg
