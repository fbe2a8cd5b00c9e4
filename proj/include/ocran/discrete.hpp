#pragma once

#include <cstddef>
#include <vector>

#include "ocran/joint_pmf.hpp"
#include "ocran/region.hpp"
#include "ocran/subset.hpp"

namespace ocran {

// Finite-alphabet CRAN: p(q) prod_l p(x_l|q) p(y_1..y_K | x_1..x_L).
struct DiscreteScenario {
  std::vector<double> time_share;              // p(q)
  std::vector<int> input_sizes;                // |X_l|
  std::vector<int> output_sizes;               // |Y_k|
  std::vector<std::vector<double>> input_pmf;  // [l]: row-major [q][x_l]
  // Row-major [x_1]..[x_L][y_1]..[y_K], y_K fastest; each x-row is a pmf over y.
  std::vector<double> channel;
  std::vector<double> fronthaul;  // C_k, bits

  int num_users() const { return static_cast<int>(input_sizes.size()); }
  int num_relays() const { return static_cast<int>(output_sizes.size()); }
  int num_q() const { return static_cast<int>(time_share.size()); }
  std::size_t input_tuples() const;
  std::size_t output_tuples() const;

  // Throws ValidationError naming the field on any violated invariant.
  void validate() const;
};

// Per-relay test channels p(u_k | y_k, q).
struct AuxChannels {
  std::vector<int> sizes;                  // |U_k|
  std::vector<std::vector<double>> table;  // [k]: row-major [q][y_k][u_k]

  double prob(const DiscreteScenario& sc, int k, int q, int y, int u) const {
    return table[k][(static_cast<std::size_t>(q) * sc.output_sizes[k] + y) * sizes[k] + u];
  }
};

void validate_aux(const DiscreteScenario& sc, const AuxChannels& aux);

// Common randomness W ~ p(w|q) and deterministic maps u_k = f_k(w, y_k, q).
struct OuterBoundWitness {
  int w_size = 1;
  std::vector<double> pw;             // row-major [q][w]
  std::vector<int> u_sizes;           // |U_k|
  std::vector<std::vector<int>> map;  // [k]: row-major [q][w][y_k] -> u_k

  int apply(const DiscreteScenario& sc, int k, int w, int y, int q) const {
    return map[k][(static_cast<std::size_t>(q) * w_size + w) * sc.output_sizes[k] + y];
  }
};

void validate_witness(const DiscreteScenario& sc, const OuterBoundWitness& witness);

// Axis positions of the CRAN joint tensor: Q, X_1..X_L, Y_1..Y_K, U_1..U_K.
struct CranLayout {
  int users = 0;
  int relays = 0;

  int q_axis() const { return 0; }
  int x_axis(int l) const { return 1 + l; }
  int y_axis(int k) const { return 1 + users + k; }
  int u_axis(int k) const { return 1 + users + relays + k; }

  AxisSet q() const { return axis(q_axis()); }
  AxisSet x(Mask m) const;
  AxisSet y(Mask m) const;
  AxisSet u(Mask m) const;
  AxisSet all_x() const { return x(full_mask(users)); }
};

inline constexpr std::size_t kMaxJointEntries = 10'000'000;

// max |p(y_K|x_L) - prod_k p(y_k|x_L)| over all entries.
double factorization_deviation(const DiscreteScenario& sc);

bool check_conditional_independence(const DiscreteScenario& sc, double tol = 1e-9);

// p(q) prod p(x_l|q) p(y_K|x_L) prod p(u_k|y_k,q). Throws CapacityError above 1e7 entries.
JointPmf build_joint(const DiscreteScenario& sc, const AuxChannels& aux);

// Joint with u_k = f_k(w, y_k, q) and W summed out.
JointPmf build_joint(const DiscreteScenario& sc, const OuterBoundWitness& witness);

// Exact functional representation of an aux: W = (W_1..W_K) with
// W_k in U_k^{|Y_k|} independent given Q, f_k(w, y, q) = w_k[y].
OuterBoundWitness witness_from_aux(const DiscreteScenario& sc, const AuxChannels& aux);

// Induced per-relay channels p(u_k|y_k,q) of a witness.
AuxChannels aux_from_witness(const DiscreteScenario& sc, const OuterBoundWitness& witness);

// Rate-constraint evaluator over one joint tensor. One instance per task.
class DiscreteEvaluator {
 public:
  DiscreteEvaluator(const DiscreteScenario& sc, const JointPmf& joint);
  DiscreteEvaluator(const DiscreteScenario& sc, JointPmf&& joint) = delete;

  // sum_{s in S}[C_s - I(Y_s;U_s|X_L,Q)] + I(X_T;U_{S^c}|X_{T^c},Q)
  double ci(SubsetPair pair);
  // sum_{s in S} C_s - I(Y_S;U_S|X_L,U_{S^c},Q) + I(X_T;U_{S^c}|X_{T^c},Q)
  double inner(SubsetPair pair);

  double info(AxisSet a, AxisSet b, AxisSet c) { return cache_.cmi(a, b, c); }
  const CranLayout& layout() const { return layout_; }

 private:
  const DiscreteScenario* sc_;
  CranLayout layout_;
  EntropyCache cache_;
};

double ci_constraint(const DiscreteScenario& sc, const AuxChannels& aux, SubsetPair pair);
double inner_constraint(const DiscreteScenario& sc, const AuxChannels& aux, SubsetPair pair);
double outer_constraint(const DiscreteScenario& sc, const OuterBoundWitness& witness, SubsetPair pair);

enum class InnerBound { ci, general };

// All constraint pairs. With InnerBound::ci on a non-factorizing channel the region is
// still evaluated and a warning is attached.
RateRegion region_discrete(const DiscreteScenario& sc, const AuxChannels& aux, InnerBound which, int threads = 1);

RateRegion region_outer(const DiscreteScenario& sc, const OuterBoundWitness& witness, int threads = 1);

}  // namespace ocran
