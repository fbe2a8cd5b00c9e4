#include "ocran/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocran/error.hpp"
#include "ocran/lp.hpp"

namespace ocran {

namespace {
constexpr double kTol = 1e-9;
}

std::vector<double> RateRegion::tightest_bounds() const {
  std::vector<double> b(static_cast<std::size_t>(full_mask(num_users)) + 1,
                        std::numeric_limits<double>::infinity());
  for (const auto& c : constraints) b[c.pair.users] = std::min(b[c.pair.users], c.bound_bits);
  return b;
}

bool RateRegion::empty() const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const Constraint& c) { return !(c.bound_bits >= -kTol); });
}

std::vector<double> RateRegion::per_user_max() const {
  std::vector<double> r(static_cast<std::size_t>(num_users), 0.0);
  if (empty()) return r;
  auto b = tightest_bounds();
  for (int l = 0; l < num_users; ++l) {
    double best = std::numeric_limits<double>::infinity();
    for (Mask t = 1; t < b.size(); ++t) {
      if (has(t, l)) best = std::min(best, b[t]);
    }
    r[l] = std::max(best, 0.0);
  }
  return r;
}

std::vector<double> RateRegion::max_weighted(std::span<const double> weights) const {
  if (static_cast<int>(weights.size()) != num_users) throw ValidationError("max_weighted: weight count mismatch");
  if (empty()) throw NumericError("max_weighted: region is empty");
  auto b = tightest_bounds();
  std::vector<std::vector<double>> a;
  std::vector<double> rhs;
  for (Mask t = 1; t < b.size(); ++t) {
    if (!std::isfinite(b[t])) continue;
    std::vector<double> row(static_cast<std::size_t>(num_users), 0.0);
    for (int l = 0; l < num_users; ++l) row[l] = has(t, l) ? 1.0 : 0.0;
    a.push_back(std::move(row));
    rhs.push_back(std::max(b[t], 0.0));
  }
  auto sol = maximize_lp(weights, a, rhs);
  if (sol.unbounded) throw NumericError("max_weighted: unbounded region");
  return sol.x;
}

double RateRegion::max_sum_rate() const {
  if (empty()) return -std::numeric_limits<double>::infinity();
  std::vector<double> ones(static_cast<std::size_t>(num_users), 1.0);
  auto x = max_weighted(ones);
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

bool point_in_region(const RateRegion& region, std::span<const double> rates) {
  if (static_cast<int>(rates.size()) != region.num_users) {
    throw ValidationError("point_in_region: expected " + std::to_string(region.num_users) + " rates, got " +
                          std::to_string(rates.size()));
  }
  for (double r : rates) {
    if (r < 0.0) throw ValidationError("point_in_region: rates must be nonnegative");
  }
  for (const auto& c : region.constraints) {
    double lhs = 0.0;
    for (int l = 0; l < region.num_users; ++l) {
      if (has(c.pair.users, l)) lhs += rates[l];
    }
    if (!(lhs <= c.bound_bits + kTol)) return false;
  }
  return true;
}

std::array<double, 2> two_user_boundary_point(const RateRegion& region, double w1, double w2) {
  if (region.num_users != 2) throw ValidationError("two_user_boundary_point: region must have two users");
  if (region.empty()) throw NumericError("two_user_boundary_point: region is empty");
  auto b = region.tightest_bounds();
  const double a1 = std::max(b[1], 0.0);
  const double a2 = std::max(b[2], 0.0);
  const double a12 = std::max(b[3], 0.0);
  // Vertex favouring user 1, vertex favouring user 2.
  const double r1_first = std::min(a1, a12);
  const std::array<double, 2> v1{r1_first, std::max(0.0, std::min(a2, a12 - r1_first))};
  const double r2_first = std::min(a2, a12);
  const std::array<double, 2> v2{std::max(0.0, std::min(a1, a12 - r2_first)), r2_first};
  if (w1 > w2) return v1;
  if (w2 > w1) return v2;
  return {0.5 * (v1[0] + v2[0]), 0.5 * (v1[1] + v2[1])};
}

}  // namespace ocran
