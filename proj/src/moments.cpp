#include "qsilo/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include <Eigen/Sparse>

#include "qsilo/core.hpp"

namespace qsilo::moments {

MomentField::MomentField(int n, double alpha) : n_(n), alpha_(alpha) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  w_ = mean_profile(n);
  k_ = source_K(n, alpha);
  row_base_.resize(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_base_[static_cast<std::size_t>(i)] =
        row_base_[static_cast<std::size_t>(i - 1)] +
        static_cast<std::size_t>((n - i) / 2 + 1);
  }
  std::size_t total = row_base_[static_cast<std::size_t>(n)];
  r_.assign(total, 0.0);
  sigma_.assign(total, 0.0);
  pairs_.reserve(total);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; j += 2) pairs_.emplace_back(i, j);
  }
}

std::size_t MomentField::index_of(int i, int j) const {
  return row_base_[static_cast<std::size_t>(i - 1)] +
         static_cast<std::size_t>((j - i) / 2);
}

double MomentField::r(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) return 0.0;
  if ((i + j) % 2 != 0) return 0.0;
  if (i > j) std::swap(i, j);
  return r_[index_of(i, j)];
}

double MomentField::sigma(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) return 0.0;
  if ((i + j) % 2 != 0) return 0.0;
  if (i > j) std::swap(i, j);
  return sigma_[index_of(i, j)];
}

void MomentField::set_r(int i, int j, double value) {
  if (i < 1 || i > n_ || j < 1 || j > n_ || (i + j) % 2 != 0) {
    throw std::out_of_range("set_r outside the stored pair set");
  }
  if (i > j) std::swap(i, j);
  r_[index_of(i, j)] = value;
}

void MomentField::sync_sigma_from_r() {
  for (std::size_t idx = 0; idx < pairs_.size(); ++idx) {
    auto [i, j] = pairs_[idx];
    if (i == j) {
      double wi = w_[static_cast<std::size_t>(i - 1)];
      sigma_[idx] = 0.5 * (wi * wi - r_[idx]);
    } else {
      sigma_[idx] = -r_[idx] / 3.0;
    }
  }
}

std::vector<double> source_K(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  std::vector<double> k(static_cast<std::size_t>(n));
  double np1 = double(n + 1);
  for (int i = 1; i <= n; ++i) {
    k[static_cast<std::size_t>(i - 1)] =
        6.0 * i * (np1 - i) - np1 * np1 - (1.0 + 2.0 * alpha);
  }
  return k;
}

namespace {

// Kernel-weighted neighbor sum for one stored pair; the diagonal source
// is added by the caller.
double kernel_rhs(const MomentField& f, int i, int j) {
  if (i == j) {
    return (f.r(i - 1, j - 1) + f.r(i + 1, j + 1)) / 3.0 +
           (f.r(i + 1, j - 1) + f.r(i - 1, j + 1)) / 6.0;
  }
  return 0.25 * (f.r(i - 1, j - 1) + f.r(i - 1, j + 1) +
                 f.r(i + 1, j - 1) + f.r(i + 1, j + 1));
}

double source_scale(const MomentField& f) {
  double kmax = 0.0;
  for (double v : f.k()) kmax = std::max(kmax, std::abs(v));
  return std::max(1.0, kmax);
}

}  // namespace

double r_system_residual(const MomentField& field) {
  double worst = 0.0;
  for (std::size_t idx = 0; idx < field.pair_count(); ++idx) {
    auto [i, j] = field.pair_at(idx);
    double want = kernel_rhs(field, i, j);
    if (i == j) want += field.k()[static_cast<std::size_t>(i - 1)];
    worst = std::max(worst, std::abs(field.r_values()[idx] - want));
  }
  return worst / source_scale(field);
}

MomentField solve_R_fixed_point(int n, double alpha, double tol,
                                long long max_iters, SolveReport* report) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  MomentField field(n, alpha);
  if (max_iters <= 0) {
    max_iters = static_cast<long long>(
        1e6 * std::max(1.0, std::log(double(n))));
  }
  double scale = source_scale(field);
  std::vector<double>& r = field.r_values();
  std::vector<double> history;
  double residual = 0.0;
  long long iters = 0;
  for (; iters < max_iters; ++iters) {
    for (std::size_t idx = 0; idx < field.pair_count(); ++idx) {
      auto [i, j] = field.pair_at(idx);
      double value = kernel_rhs(field, i, j);
      if (i == j) value += field.k()[static_cast<std::size_t>(i - 1)];
      r[idx] = value;
    }
    double worst = 0.0;
    for (std::size_t idx = 0; idx < field.pair_count(); ++idx) {
      auto [i, j] = field.pair_at(idx);
      double want = kernel_rhs(field, i, j);
      if (i == j) want += field.k()[static_cast<std::size_t>(i - 1)];
      worst = std::max(worst, std::abs(r[idx] - want));
    }
    residual = worst / scale;
    history.push_back(residual);
    if (residual <= tol) {
      ++iters;
      break;
    }
  }
  if (residual > tol) {
    throw NonConvergence(
        "fixed-point solver did not reach tol " + std::to_string(tol) +
            " in " + std::to_string(max_iters) + " sweeps",
        residual);
  }
  field.sync_sigma_from_r();
  if (report != nullptr) {
    report->iterations = iters;
    report->residual = residual;
    report->residual_history = std::move(history);
  }
  return field;
}

MomentField solve_R_direct(int n, double alpha) {
  if (n > 512) {
    throw std::length_error(
        "direct solver capped at n = 512; use the multigrid or fixed-point "
        "solver for larger n");
  }
  MomentField field(n, alpha);
  const auto count = static_cast<Eigen::Index>(field.pair_count());

  // Row (i,j): R(i,j) - sum of kernel-weighted neighbors = K(i)*1{i=j}.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(count) * 5);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(count);
  std::vector<std::size_t> base(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    base[static_cast<std::size_t>(i)] =
        base[static_cast<std::size_t>(i - 1)] +
        static_cast<std::size_t>((n - i) / 2 + 1);
  }
  auto index_of = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    return static_cast<Eigen::Index>(base[static_cast<std::size_t>(i - 1)] +
                                     static_cast<std::size_t>((j - i) / 2));
  };
  auto add_neighbor = [&](Eigen::Index row, int i, int j, double weight) {
    if (i < 1 || i > n || j < 1 || j > n) return;
    triplets.emplace_back(row, index_of(i, j), -weight);
  };
  for (std::size_t idx = 0; idx < field.pair_count(); ++idx) {
    auto [i, j] = field.pair_at(idx);
    auto row = static_cast<Eigen::Index>(idx);
    triplets.emplace_back(row, row, 1.0);
    if (i == j) {
      add_neighbor(row, i - 1, j - 1, 1.0 / 3.0);
      add_neighbor(row, i + 1, j + 1, 1.0 / 3.0);
      add_neighbor(row, i + 1, j - 1, 1.0 / 6.0);
      add_neighbor(row, i - 1, j + 1, 1.0 / 6.0);
      b[row] = field.k()[static_cast<std::size_t>(i - 1)];
    } else {
      add_neighbor(row, i - 1, j - 1, 0.25);
      add_neighbor(row, i - 1, j + 1, 0.25);
      add_neighbor(row, i + 1, j - 1, 0.25);
      add_neighbor(row, i + 1, j + 1, 0.25);
    }
  }
  Eigen::SparseMatrix<double> a(count, count);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sparse factorization failed");
  }
  Eigen::VectorXd x = solver.solve(b);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sparse solve failed");
  }
  for (std::size_t idx = 0; idx < field.pair_count(); ++idx) {
    field.r_values()[idx] = x[static_cast<Eigen::Index>(idx)];
  }
  field.sync_sigma_from_r();
  return field;
}

namespace {

struct RowCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double magnitude = 0.0;

  void take(double term) {
    rhs += term;
    magnitude += std::abs(term);
  }
  double normalized() const {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs) + magnitude);
  }
};

}  // namespace

double covariance_residual(const MomentField& f) {
  const int n = f.n();
  const double alpha = f.alpha();
  auto w2 = [&](int i) {
    double v = f.w_at(i);
    return v * v;
  };
  double worst = 0.0;

  // Diagonal balance rows.
  for (int i = 1; i <= n; ++i) {
    RowCheck row;
    row.lhs = f.sigma(i, i);
    row.take(alpha);
    row.take(f.sigma(i + 1, i + 1) / 3.0);
    row.take(f.sigma(i - 1, i - 1) / 3.0);
    row.take(f.sigma(i - 1, i + 1) / 4.0);
    row.take(f.sigma(i + 1, i - 1) / 4.0);
    row.take(w2(i + 1) / 12.0);
    row.take(w2(i - 1) / 12.0);
    worst = std::max(worst, row.normalized());
  }

  // Distance-2 rows, upper side.
  for (int i = 1; i + 2 <= n; ++i) {
    RowCheck row;
    row.lhs = f.sigma(i, i + 2);
    row.take(f.sigma(i + 1, i + 3) / 4.0);
    row.take(f.sigma(i - 1, i + 3) / 4.0);
    row.take(f.sigma(i - 1, i + 1) / 4.0);
    row.take(f.sigma(i + 1, i + 1) / 6.0);
    row.take(-w2(i + 1) / 12.0);
    worst = std::max(worst, row.normalized());
  }

  // Distance-2 rows, lower side.
  for (int i = 3; i <= n; ++i) {
    RowCheck row;
    row.lhs = f.sigma(i, i - 2);
    row.take(f.sigma(i - 1, i - 3) / 4.0);
    row.take(f.sigma(i + 1, i - 3) / 4.0);
    row.take(f.sigma(i + 1, i - 1) / 4.0);
    row.take(f.sigma(i - 1, i - 1) / 6.0);
    row.take(-w2(i - 1) / 12.0);
    worst = std::max(worst, row.normalized());
  }

  // Four-corner averaging at distance > 2.
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 4; j <= n; j += 2) {
      RowCheck row;
      row.lhs = f.sigma(i, j);
      row.take(f.sigma(i - 1, j - 1) / 4.0);
      row.take(f.sigma(i - 1, j + 1) / 4.0);
      row.take(f.sigma(i + 1, j - 1) / 4.0);
      row.take(f.sigma(i + 1, j + 1) / 4.0);
      worst = std::max(worst, row.normalized());
    }
  }
  return worst;
}

}  // namespace qsilo::moments
