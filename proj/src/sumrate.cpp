#include "ocran/sumrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ocran/error.hpp"
#include "ocran/lp.hpp"

namespace ocran {

namespace {

constexpr double kTol = 1e-9;

Mask prefix_mask(const std::vector<int>& ordering, std::size_t count) {
  Mask m = 0;
  for (std::size_t p = 0; p < count; ++p) m |= Mask{1} << ordering[p];
  return m;
}

void check_ordering(const std::vector<int>& ordering, int relays) {
  std::vector<int> sorted = ordering;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(static_cast<std::size_t>(relays));
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) throw ValidationError("ordering must be a permutation of all relays");
}

}  // namespace

std::vector<std::vector<int>> all_orderings(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

SumRateAnalyzer::SumRateAnalyzer(const DiscreteScenario& sc, const AuxChannels& aux)
    : sc_(sc), joint_(build_joint(sc, aux)), lay_{sc.num_users(), sc.num_relays()}, cache_(joint_) {}

double SumRateAnalyzer::input_information(Mask relays) { return cache_.cmi(lay_.all_x(), lay_.u(relays), lay_.q()); }

double SumRateAnalyzer::compression_information(Mask relays) {
  const Mask rest = full_mask(lay_.relays) & ~relays;
  return cache_.cmi(lay_.u(relays), lay_.y(relays), lay_.u(rest) | lay_.q());
}

double SumRateAnalyzer::jd_sum_rate() {
  const Mask all = full_mask(lay_.relays);
  double best = std::numeric_limits<double>::infinity();
  for (Mask s = 0; s <= all; ++s) {
    const Mask rest = all & ~s;
    double v = 0.0;
    for (int k : members(s)) v += sc_.fronthaul[k];
    v -= cache_.cmi(lay_.y(s), lay_.u(s), lay_.all_x() | lay_.u(rest) | lay_.q());
    v += input_information(rest);
    best = std::min(best, v);
  }
  return std::max(best, 0.0);
}

double SumRateAnalyzer::g(double r_sum, Mask s, bool positive) {
  double v = r_sum + compression_information(s) - input_information(full_mask(lay_.relays));
  return positive ? std::max(v, 0.0) : v;
}

SupermodularityReport SumRateAnalyzer::check_supermodular(double r_sum, double tol) {
  const int k_count = lay_.relays;
  if (k_count > 12) throw CapacityError("check_supermodular: at most 12 relays");
  std::vector<double> gp(static_cast<std::size_t>(full_mask(k_count)) + 1);
  for (Mask s = 0; s < gp.size(); ++s) gp[s] = g(r_sum, s, true);
  SupermodularityReport rep;
  bool any = false;
  for (Mask s = 0; s < gp.size(); ++s) {
    for (int i = 0; i < k_count; ++i) {
      if (has(s, i)) continue;
      for (int j = i + 1; j < k_count; ++j) {
        if (has(s, j)) continue;
        const Mask si = s | (Mask{1} << i);
        const Mask sj = s | (Mask{1} << j);
        double slack = gp[si | sj] + gp[s] - gp[si] - gp[sj];
        rep.min_slack = any ? std::min(rep.min_slack, slack) : slack;
        any = true;
      }
    }
  }
  rep.holds = rep.min_slack >= -tol;
  return rep;
}

OrderingResult SumRateAnalyzer::extreme_point(double r_sum, const std::vector<int>& ordering) {
  check_ordering(ordering, lay_.relays);
  OrderingResult res;
  res.ordering = ordering;
  res.swz_order.assign(ordering.rbegin(), ordering.rend());
  res.extreme_point.assign(static_cast<std::size_t>(lay_.relays), 0.0);
  res.g_chain.resize(ordering.size() + 1);
  for (std::size_t p = 0; p <= ordering.size(); ++p) res.g_chain[p] = g(r_sum, prefix_mask(ordering, p));
  for (std::size_t p = 0; p < ordering.size(); ++p) {
    res.extreme_point[ordering[p]] = std::max(res.g_chain[p + 1], 0.0) - std::max(res.g_chain[p], 0.0);
  }
  return res;
}

SwzRequirements SumRateAnalyzer::swz_required_fronthaul(const std::vector<int>& ordering) {
  check_ordering(ordering, lay_.relays);
  SwzRequirements req;
  req.fronthaul.assign(static_cast<std::size_t>(lay_.relays), 0.0);
  for (std::size_t p = 0; p < ordering.size(); ++p) {
    const int k = ordering[p];
    req.fronthaul[k] = cache_.cmi(lay_.u(Mask{1} << k), lay_.y(Mask{1} << k), lay_.u(prefix_mask(ordering, p)) | lay_.q());
  }
  const AxisSet u_all = lay_.u(full_mask(lay_.relays));
  AxisSet decoded = 0;
  for (int l = 0; l < lay_.users; ++l) {
    const AxisSet xl = axis(lay_.x_axis(l));
    req.sum_rate_chain += cache_.cmi(xl, u_all, decoded | lay_.q());
    decoded |= xl;
  }
  req.sum_rate = input_information(full_mask(lay_.relays));
  return req;
}

OrderingResult SumRateAnalyzer::swz_dominating_point(double r_sum, const std::vector<int>& ordering) {
  OrderingResult res = extreme_point(r_sum, ordering);
  if (res.g_chain[0] > kTol) {
    throw ValidationError("swz_dominating_point: R_sum exceeds I(X_L;U_K|Q), the fronthaul polytope is degenerate");
  }
  const std::size_t k_count = ordering.size();
  res.dominating_fronthaul.assign(k_count, 0.0);
  std::size_t j = 0;
  while (j < k_count && !(res.g_chain[j + 1] > 0.0)) ++j;
  if (j == k_count) {
    res.j_star = -1;
    res.alpha = 1.0;
    res.dominating_sum_rate = 0.0;
    return res;
  }
  res.j_star = static_cast<int>(j);
  auto tail = [&](std::size_t p) {
    Mask m = 0;
    for (std::size_t i = p + 1; i < k_count; ++i) m |= Mask{1} << ordering[i];
    return m;
  };
  const int relay_j = ordering[j];
  const Mask after_j = tail(j);
  const double denom = cache_.cmi(lay_.y(Mask{1} << relay_j), lay_.u(Mask{1} << relay_j), lay_.u(after_j) | lay_.q());
  // A relay carrying no information is deactivated for free.
  res.alpha = denom < 1e-12 ? 1.0 : std::clamp(-res.g_chain[j] / denom, 0.0, 1.0);
  res.dominating_fronthaul[relay_j] = (1.0 - res.alpha) * denom;
  for (std::size_t p = j + 1; p < k_count; ++p) {
    const int k = ordering[p];
    res.dominating_fronthaul[k] = cache_.cmi(lay_.y(Mask{1} << k), lay_.u(Mask{1} << k), lay_.u(tail(p)) | lay_.q());
  }
  res.dominating_sum_rate =
      res.alpha * input_information(after_j) + (1.0 - res.alpha) * input_information(after_j | (Mask{1} << relay_j));
  return res;
}

SwzCheck SumRateAnalyzer::swz_equals_jd() {
  if (lay_.relays > 8) throw CapacityError("swz_equals_jd: at most 8 relays");
  SwzCheck out;
  out.jd_sum_rate = jd_sum_rate();
  for (const auto& ord : all_orderings(lay_.relays)) out.orderings.push_back(swz_dominating_point(out.jd_sum_rate, ord));

  // Time-share the dominating points within the available fronthaul; the
  // unused fraction leaves every relay silent.
  const std::size_t n = out.orderings.size();
  std::vector<double> objective(n);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(lay_.relays) + 1, std::vector<double>(n, 0.0));
  std::vector<double> rhs(static_cast<std::size_t>(lay_.relays) + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    objective[i] = out.orderings[i].dominating_sum_rate;
    for (int k = 0; k < lay_.relays; ++k) rows[k][i] = out.orderings[i].dominating_fronthaul[k];
    rows.back()[i] = 1.0;
  }
  for (int k = 0; k < lay_.relays; ++k) rhs[k] = sc_.fronthaul[k];
  auto sol = maximize_lp(objective, rows, rhs);
  out.weights = sol.x;
  out.swz_sum_rate = sol.value;
  out.gap = out.jd_sum_rate - out.swz_sum_rate;

  // Prefer an ordering that fits the fronthaul on its own; otherwise the
  // heaviest in the mixture. Ties go to the lexicographically smallest.
  int best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = out.orderings[i];
    bool fits = true;
    for (int k = 0; k < lay_.relays; ++k) fits = fits && r.dominating_fronthaul[k] <= sc_.fronthaul[k] + kTol;
    if (fits && (best < 0 || r.dominating_sum_rate > out.orderings[best].dominating_sum_rate + 1e-12)) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (out.weights[i] > out.weights[best] + 1e-12) best = static_cast<int>(i);
    }
  }
  out.best_ordering = out.orderings[best].ordering;
  return out;
}

bool SumRateAnalyzer::sd_achievable(double r_sum, const std::vector<double>& fronthaul) {
  if (static_cast<int>(fronthaul.size()) != lay_.relays) throw ValidationError("sd_achievable: fronthaul size mismatch");
  if (r_sum > input_information(full_mask(lay_.relays)) + kTol) return false;
  for (Mask s = 1; s <= full_mask(lay_.relays); ++s) {
    double c = 0.0;
    for (int k : members(s)) c += fronthaul[k];
    if (c < compression_information(s) - kTol) return false;
  }
  return true;
}

double jd_sum_rate(const DiscreteScenario& sc, const AuxChannels& aux) { return SumRateAnalyzer(sc, aux).jd_sum_rate(); }

double g_function(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum, Mask s, bool positive) {
  return SumRateAnalyzer(sc, aux).g(r_sum, s, positive);
}

SupermodularityReport check_supermodular(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum) {
  return SumRateAnalyzer(sc, aux).check_supermodular(r_sum);
}

OrderingResult extreme_point(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum,
                             const std::vector<int>& ordering) {
  return SumRateAnalyzer(sc, aux).extreme_point(r_sum, ordering);
}

SwzRequirements swz_required_fronthaul(const DiscreteScenario& sc, const AuxChannels& aux,
                                       const std::vector<int>& ordering) {
  return SumRateAnalyzer(sc, aux).swz_required_fronthaul(ordering);
}

OrderingResult swz_dominating_point(const DiscreteScenario& sc, const AuxChannels& aux, double r_sum,
                                    const std::vector<int>& ordering) {
  return SumRateAnalyzer(sc, aux).swz_dominating_point(r_sum, ordering);
}

SwzCheck swz_equals_jd(const DiscreteScenario& sc, const AuxChannels& aux) { return SumRateAnalyzer(sc, aux).swz_equals_jd(); }

}  // namespace ocran
