#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ocran/subset.hpp"

namespace ocran {

struct Constraint {
  SubsetPair pair;
  double bound_bits = 0.0;  // may be -inf
};

// Finite list of linear constraints sum_{t in T} R_t <= bound(T, S) over the
// nonnegative orthant. Negative bounds are kept as computed.
struct RateRegion {
  int num_users = 0;
  int num_relays = 0;
  std::vector<Constraint> constraints;
  std::vector<std::string> warnings;

  // Tightest bound per user set T (min over S), indexed by T mask; entry 0 unused.
  std::vector<double> tightest_bounds() const;

  // True when even the zero rate vector violates some constraint.
  bool empty() const;

  // Largest single-user rate with the other users silent; zeros when empty.
  std::vector<double> per_user_max() const;

  // max sum_l R_l over the region (LP); -inf when empty.
  double max_sum_rate() const;

  // Maximizer of w.R over the region (LP). Throws NumericError when empty.
  std::vector<double> max_weighted(std::span<const double> weights) const;
};

// true iff R >= 0 has num_users entries and sum_{t in T} R_t <= bound + 1e-9
// for every constraint.
bool point_in_region(const RateRegion& region, std::span<const double> rates);

// Pareto point of a two-user region maximizing w1 R1 + w2 R2. On an exact
// weight tie the midpoint of the sum-rate face is returned.
std::array<double, 2> two_user_boundary_point(const RateRegion& region, double w1, double w2);

}  // namespace ocran
