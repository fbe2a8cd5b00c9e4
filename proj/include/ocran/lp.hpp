#pragma once

#include <span>
#include <vector>

namespace ocran {

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  bool unbounded = false;
};

// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so that x = 0 is
// feasible. Dense tableau simplex with Bland's rule; sized for the handful of
// rows and at most a few tens of thousands of columns used here.
LpSolution maximize_lp(std::span<const double> c, const std::vector<std::vector<double>>& a,
                       std::span<const double> b);

}  // namespace ocran
