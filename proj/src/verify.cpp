#include "ocran/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "ocran/codebook.hpp"
#include "ocran/error.hpp"
#include "ocran/gaussian.hpp"
#include "ocran/optimize.hpp"
#include "ocran/parallel.hpp"
#include "ocran/random.hpp"
#include "ocran/random_instances.hpp"

namespace ocran {

namespace {

struct CaseResult {
  double gap = 0.0;  // compared against the suite tolerance
  bool failed = false;
  std::string note;
};

using CaseFn = std::function<CaseResult(std::size_t index, Rng& rng, const VerifyOptions& opts)>;

int uniform_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1)); }

std::vector<int> random_sizes(Rng& rng, int count, int lo, int hi) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(uniform_int(rng, lo, hi));
  return out;
}

CaseResult class_equivalence_case(std::size_t, Rng& rng, const VerifyOptions&) {
  DiscreteShape shape;
  shape.users = uniform_int(rng, 1, 2);
  shape.relays = uniform_int(rng, 1, 2);
  shape.q = uniform_int(rng, 1, 2);
  DiscreteScenario sc = random_discrete_scenario(rng, shape);
  AuxChannels aux = random_aux(rng, sc, random_sizes(rng, shape.relays, 1, 3));
  JointPmf joint = build_joint(sc, aux);
  DiscreteEvaluator ev(sc, joint);
  CaseResult res;
  for (const auto& pair : enumerate_constraint_pairs(sc.num_users(), sc.num_relays())) {
    res.gap = std::max(res.gap, std::abs(ev.ci(pair) - ev.inner(pair)));
  }
  res.failed = !(res.gap <= 1e-9);
  return res;
}

CaseResult swz_case(std::size_t, Rng& rng, const VerifyOptions&) {
  DiscreteShape shape;
  shape.users = uniform_int(rng, 1, 2);
  shape.relays = 2;
  shape.q = uniform_int(rng, 1, 2);
  DiscreteScenario sc = random_discrete_scenario(rng, shape);
  AuxChannels aux = random_aux(rng, sc, random_sizes(rng, 2, 2, 3));
  SwzCheck check = swz_equals_jd(sc, aux);
  CaseResult res;
  // Dominating points may switch relays off, which can beat the fixed-aux
  // joint decoder; only a shortfall counts.
  res.gap = std::max(check.gap, 0.0);
  for (const auto& r : check.orderings) res.gap = std::max(res.gap, ordering_invariant_violation(r, check.jd_sum_rate));
  res.failed = !(res.gap <= 1e-9);
  return res;
}

CaseResult supermodular_case(std::size_t, Rng& rng, const VerifyOptions&) {
  DiscreteShape shape;
  shape.users = uniform_int(rng, 1, 2);
  shape.relays = uniform_int(rng, 2, 3);
  shape.q = uniform_int(rng, 1, 2);
  shape.factorizing = uniform01(rng) < 0.5;
  DiscreteScenario sc = random_discrete_scenario(rng, shape);
  AuxChannels aux = random_aux(rng, sc, random_sizes(rng, shape.relays, 2, 3));
  SumRateAnalyzer an(sc, aux);
  const double r_sum = uniform01(rng) * an.input_information(full_mask(sc.num_relays()));
  SupermodularityReport rep = an.check_supermodular(r_sum);
  CaseResult res;
  res.gap = std::max(0.0, -rep.min_slack);
  res.failed = rep.min_slack < -1e-10;
  return res;
}

CaseResult mc_case(std::size_t, Rng& rng, const VerifyOptions& opts) {
  GaussianShape shape;
  shape.users = uniform_int(rng, 1, 2);
  shape.relays = uniform_int(rng, 1, 2);
  GaussianScenario sc = random_gaussian_scenario(rng, shape);
  QuantizerSetGaussian q = random_quantizers(rng, sc, 0.1, 0.9);
  SubsetPair pair;
  pair.users = static_cast<Mask>(uniform_int(rng, 1, static_cast<int>(full_mask(sc.num_users()))));
  pair.relays = static_cast<Mask>(uniform_int(rng, 0, static_cast<int>(full_mask(sc.num_relays())) - 1));
  const double analytic = information_term_gaussian(sc, q, pair) + opts.gaussian_perturbation;
  McEstimate est = mc_mutual_information(sc, q, pair, opts.mc_samples, rng());
  CaseResult res;
  const double diff = std::abs(est.mean_bits - analytic);
  res.gap = diff;
  const bool within_se = diff <= 3.0 * est.std_error_bits + 1e-12;
  const bool within_rel = diff <= 0.02 * std::abs(analytic) + 1e-12;
  res.failed = !(within_se && within_rel);
  if (res.failed) {
    std::ostringstream os;
    os << "analytic " << analytic << " estimate " << est.mean_bits << " se " << est.std_error_bits;
    res.note = os.str();
  }
  return res;
}

CaseResult codebook_case(std::size_t index, Rng& rng, const VerifyOptions& opts) {
  CodebookEnsemble ens;
  ens.rate_bits = 0.5 + uniform01(rng);
  ens.blocklength = uniform_int(rng, 2, 4);
  const bool point_mass = index % 4 == 3;
  const int q_count = uniform_int(rng, 1, 2);
  for (int q = 0; q < q_count; ++q) {
    if (point_mass) {
      ens.input_pmf.push_back(q % 2 == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0});
    } else {
      ens.input_pmf.push_back(dirichlet(2, 1.0, rng));
    }
  }
  for (int i = 0; i < ens.blocklength; ++i) ens.time_sequence.push_back(uniform_int(rng, 0, q_count - 1));
  ens.seed = rng();
  CodebookMarginal m = sample_codebook_marginal(ens, opts.codebook_trials);
  CaseResult res;
  res.gap = m.max_tv;
  res.failed = point_mass ? m.max_tv != 0.0 : !(m.max_tv <= 0.02);
  return res;
}

CaseResult matrix_lemma_case(std::size_t, Rng& rng, const VerifyOptions&) {
  const auto n = static_cast<Eigen::Index>(uniform_int(rng, 1, 4));
  CMatrix a = random_pd(rng, n);
  CMatrix b = a + random_psd(rng, n, uniform_int(rng, 0, static_cast<int>(n)));
  CMatrix c = random_pd(rng, n);
  CaseResult res;
  const double lemma_gap = matrix_lemma_gap(a, b, c);
  const int count = uniform_int(rng, 2, 4);
  std::vector<CMatrix> mats;
  for (int i = 0; i < count; ++i) mats.push_back(random_pd(rng, n, 0.05, 5.0));
  std::vector<double> w = dirichlet(static_cast<std::size_t>(count), 1.0, rng);
  const double mean_gap = min_eigenvalue(arithmetic_mean(mats, w) - harmonic_mean(mats, w));
  const double slack = std::min(lemma_gap, mean_gap);
  res.gap = std::max(0.0, -slack);
  res.failed = slack < -1e-10;
  return res;
}

const std::map<std::string, std::pair<CaseFn, std::size_t>>& registry() {
  static const std::map<std::string, std::pair<CaseFn, std::size_t>> r = {
      {"class-equivalence", {class_equivalence_case, 100}},
      {"swz", {swz_case, 50}},
      {"supermodular", {supermodular_case, 1000}},
      {"mc", {mc_case, 10}},
      {"codebook", {codebook_case, 4}},
      {"matrix-lemma", {matrix_lemma_case, 10000}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"class-equivalence", "swz", "supermodular",
                                                 "mc", "codebook", "matrix-lemma"};
  return names;
}

std::size_t default_instances(const std::string& suite) {
  auto it = registry().find(suite);
  if (it == registry().end()) throw ValidationError("suite: unknown suite '" + suite + "'");
  return it->second.second;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ValidationError("suite: unknown suite '" + name + "'");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = opts.instances > 0 ? opts.instances : it->second.second;
  std::vector<CaseResult> results(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    Rng rng(split_seed(opts.seed, i));
    results[i] = it->second.first(i, rng, opts);
  });
  SuiteReport rep;
  rep.suite = name;
  rep.cases = n;
  for (std::size_t i = 0; i < n; ++i) {
    rep.worst_gap = std::max(rep.worst_gap, results[i].gap);
    if (results[i].failed) {
      ++rep.failures;
      if (rep.notes.size() < 5) {
        rep.notes.push_back("case " + std::to_string(i) + (results[i].note.empty() ? "" : ": " + results[i].note));
      }
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double ordering_invariant_violation(const OrderingResult& r, double r_sum) {
  double total = 0.0;
  for (double c : r.extreme_point) total += c;
  double worst = std::abs(total - std::max(r.g_chain.back(), 0.0));
  if (!r.dominating_fronthaul.empty()) {
    for (std::size_t k = 0; k < r.extreme_point.size(); ++k) {
      worst = std::max(worst, r.dominating_fronthaul[k] - r.extreme_point[k]);
    }
    worst = std::max(worst, r_sum - r.dominating_sum_rate);
  }
  return std::max(worst, 0.0);
}

}  // namespace ocran
