#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ocran/discrete.hpp"
#include "ocran/gaussian.hpp"
#include "ocran/subset.hpp"

namespace ocran {

enum class Objective { sum_rate, weighted };
enum class Method { grid, coordinate_ascent, projected_gradient };

struct OptimizerConfig {
  Objective objective = Objective::sum_rate;
  std::vector<double> weights;  // one per user, used by Objective::weighted
  Method method = Method::projected_gradient;
  int restarts = 4;
  int max_iters = 500;
  double step_tol = 1e-10;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate(int num_users) const;
};

// Restart r is seeded with split_seed(seed, r). Restart 0 is deterministic
// (B = 0 for Gaussian, u = y mod |U| for discrete).
struct GaussianOptimum {
  QuantizerSetGaussian quantizers;
  double objective = 0.0;
  std::vector<double> trace;  // objective after every accepted step of the winning restart
  bool converged = false;
  int restart = 0;
  int iterations = 0;
  std::vector<SubsetPair> active;  // constraints within 1e-6 of tight at the optimum
};

struct DiscreteOptimum {
  AuxChannels aux;
  double objective = 0.0;
  std::vector<double> trace;
  bool converged = false;
  int restart = 0;
  int iterations = 0;
  std::vector<SubsetPair> active;
};

// Vertices of {y >= 0 : sum_{T contains l} y_T >= w_l for every user l}, indexed by
// T mask (entry 0 unused). max w.R over a region with tightest bounds f_T equals
// min over these vertices of y.f whenever every f_T >= 0.
std::vector<std::vector<double>> weighted_dual_vertices(int users, const std::vector<double>& weights);
double weighted_value_from_duals(const std::vector<std::vector<double>>& duals, const std::vector<double>& tight);

// min over S of every user set's bound, indexed by T mask.
std::vector<double> tightest_gaussian_bounds(const GaussianScenario& sc, const QuantizerSetGaussian& q);

// Sum objective: min over S of the T = all-users bound. Weighted objective:
// max of w.R over the region, -inf when the region is empty.
double gaussian_objective(const GaussianScenario& sc, const QuantizerSetGaussian& q, const OptimizerConfig& cfg);

GaussianOptimum optimize_gaussian_quantizers(const GaussianScenario& sc, const OptimizerConfig& cfg);

// Sum objective: jd_sum_rate. Weighted objective: LP over the inner region.
double discrete_objective(const DiscreteScenario& sc, const AuxChannels& aux, const OptimizerConfig& cfg);

DiscreteOptimum optimize_discrete_aux(const DiscreteScenario& sc, const std::vector<int>& sizes,
                                      const OptimizerConfig& cfg);

// Real coordinates of the normalized quantizers G_k = Sigma_k^{1/2} B_k Sigma_k^{1/2}:
// per relay the diagonal, then Re and Im of the strict upper triangle.
std::vector<double> quantizer_params(const GaussianScenario& sc, const QuantizerSetGaussian& q);
QuantizerSetGaussian quantizers_from_params(const GaussianScenario& sc, const std::vector<double>& params);
// Clips every G_k to eigenvalues in [0, 1 - 1e-9].
std::vector<double> project_params(const GaussianScenario& sc, const std::vector<double>& params);

// Gradient of one constraint with respect to quantizer_params.
std::vector<double> constraint_param_gradient(const GaussianScenario& sc, const QuantizerSetGaussian& q,
                                              SubsetPair pair);

// Active branch of the sum objective (smallest S mask on ties) and its gradient.
struct SumBranch {
  Mask relays = 0;
  double value = 0.0;
  double gap_to_next = 0.0;  // distance to the second smallest bound, +inf if K = 0
  std::vector<double> gradient;
};
SumBranch sum_objective_branch(const GaussianScenario& sc, const QuantizerSetGaussian& q);

struct GradientCheck {
  double max_rel_error = 0.0;
  bool inconclusive = false;
  std::vector<double> numeric;
  std::vector<double> analytic;
};

// Central differences with h = 1e-5 * max(1, |x_i|); error is
// max|numeric - analytic| / max(max|analytic|, 1e-12).
GradientCheck finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                                const std::function<std::vector<double>(const std::vector<double>&)>& gradient,
                                const std::vector<double>& x);

// The sum objective at q against its branch gradient; inconclusive when the two
// smallest subset bounds are within 1e-6.
GradientCheck sum_objective_gradient_check(const GaussianScenario& sc, const QuantizerSetGaussian& q);

struct McEstimate {
  double mean_bits = 0.0;
  double std_error_bits = 0.0;
  std::size_t samples = 0;
};

// Sampled I(X_T; U_{S^c} | X_{T^c}) with U_k = Y_k + Z_k, Z_k ~ CN(0, B_k^{-1} - Sigma_k).
// Throws ValidationError when some B_k with k outside S has no finite test channel.
McEstimate mc_mutual_information(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair,
                                 std::size_t samples, std::uint64_t seed);

}  // namespace ocran
