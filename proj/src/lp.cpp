#include "ocran/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "ocran/error.hpp"

namespace ocran {

LpSolution maximize_lp(std::span<const double> c, const std::vector<std::vector<double>>& a,
                       std::span<const double> b) {
  const auto m = static_cast<Eigen::Index>(a.size());
  const auto n = static_cast<Eigen::Index>(c.size());
  if (static_cast<Eigen::Index>(b.size()) != m) throw ValidationError("maximize_lp: row count mismatch");
  constexpr double kEps = 1e-12;

  // Columns: n structural, m slack, rhs. Last row holds reduced costs.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(a[i].size()) != n) throw ValidationError("maximize_lp: column count mismatch");
    if (b[i] < -kEps) throw ValidationError("maximize_lp: negative right-hand side");
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = a[i][j];
    t(i, n + i) = 1.0;
    t(i, n + m) = std::max(b[i], 0.0);
  }
  for (Eigen::Index j = 0; j < n; ++j) t(m, j) = -c[j];
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  LpSolution sol;
  const Eigen::Index max_pivots = 50 * (n + m) + 1000;
  for (Eigen::Index it = 0; it < max_pivots; ++it) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > kEps) {
        double ratio = t(i, n + m) / t(i, enter);
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      sol.unbounded = true;
      sol.value = std::numeric_limits<double>::infinity();
      return sol;
    }
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[leave] = enter;
  }

  sol.x.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t(i, n + m);
  }
  sol.value = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) sol.value += c[j] * sol.x[j];
  return sol;
}

}  // namespace ocran
