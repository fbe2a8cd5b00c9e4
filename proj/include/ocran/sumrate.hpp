#pragma once

#include <vector>

#include "ocran/discrete.hpp"
#include "ocran/joint_pmf.hpp"
#include "ocran/subset.hpp"

namespace ocran {

// One relay ordering pi: the extreme point of the fronthaul polytope
// {C : sum_{s in S} C_s >= g+(S)} it generates, and the time-shared
// successive Wyner-Ziv operating point that dominates it.
struct OrderingResult {
  std::vector<int> ordering;             // pi(1..K), 0-based relay indices
  std::vector<double> g_chain;           // g({pi(1..k)}), k = 0..K
  std::vector<double> extreme_point;     // C~ indexed by relay
  int j_star = -1;                       // 0-based position of the first positive g, -1 if none
  double alpha = 1.0;
  double dominating_sum_rate = 0.0;      // R-bar
  std::vector<double> dominating_fronthaul;  // C' indexed by relay
  std::vector<int> swz_order;            // compression/decoding order, reverse of `ordering`
};

struct SupermodularityReport {
  bool holds = true;
  double min_slack = 0.0;  // over all S and i != j outside S; 0 when vacuous
};

struct SwzRequirements {
  std::vector<double> fronthaul;  // I(U_pi(k); Y_pi(k) | U_pi(1..k-1), Q), indexed by relay
  double sum_rate_chain = 0.0;    // sum_l I(X_l; U_K | X_1^{l-1}, Q)
  double sum_rate = 0.0;          // I(X_L; U_K | Q)
};

struct SwzCheck {
  double jd_sum_rate = 0.0;
  double swz_sum_rate = 0.0;  // best time-shared SWZ sum-rate within the scenario's fronthaul
  double gap = 0.0;           // jd - swz
  std::vector<int> best_ordering;
  std::vector<OrderingResult> orderings;  // all K! in lexicographic order
  std::vector<double> weights;            // time-sharing weight of each ordering
};

// Information quantities of the sum-rate layer over one joint tensor.
// Holds a private entropy cache: use one instance per task.
class SumRateAnalyzer {
 public:
  SumRateAnalyzer(const DiscreteScenario& sc, const AuxChannels& aux);
  SumRateAnalyzer(const SumRateAnalyzer&) = delete;
  SumRateAnalyzer& operator=(const SumRateAnalyzer&) = delete;

  int num_relays() const { return sc_.num_relays(); }

  // min over S of sum_S C_s - I(Y_S;U_S|X_L,U_{S^c},Q) + I(U_{S^c};X_L|Q), floored at 0.
  double jd_sum_rate();

  // R_sum + I(U_S;Y_S|U_{S^c},Q) - I(U_K;X_L|Q); positive part when `positive`.
  double g(double r_sum, Mask s, bool positive = false);

  SupermodularityReport check_supermodular(double r_sum, double tol = 1e-10);

  OrderingResult extreme_point(double r_sum, const std::vector<int>& ordering);
  SwzRequirements swz_required_fronthaul(const std::vector<int>& ordering);
  OrderingResult swz_dominating_point(double r_sum, const std::vector<int>& ordering);
  SwzCheck swz_equals_jd();

  // Separate decompression then decoding: R <= I(X_L;U_K|Q) and
  // sum_S C_s >= I(U_S;Y_S|U_{S^c},Q) for all nonempty S, both within 1e-9.
  bool sd_achievable(double r_sum, const std::vector<double>& fronthaul);

  // I(X_L; U_S | Q)
  double input_information(Mask relays);
  // I(U_S; Y_S | U_{S^c}, Q)
  double compression_information(Mask relays);

 private:
  DiscreteScenario sc_;
  JointPmf joint_;
  CranLayout lay_;
  EntropyCache cache_;
};

double jd_sum_rate(const DiscreteScenario& sc, const AuxChannels& aux);
double g_function(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum, Mask s, bool positive = false);
SupermodularityReport check_supermodular(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum);
OrderingResult extreme_point(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum,
                             const std::vector<int>& ordering);
SwzRequirements swz_required_fronthaul(const DiscreteScenario& sc, const AuxChannels& aux,
                                       const std::vector<int>& ordering);
OrderingResult swz_dominating_point(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum,
                                    const std::vector<int>& ordering);
SwzCheck swz_equals_jd(const DiscreteScenario& sc, const AuxChannels& aux);

// All permutations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> all_orderings(int n);

}  // namespace ocran
