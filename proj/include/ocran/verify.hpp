#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocran/sumrate.hpp"

namespace ocran {

struct SuiteReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_gap = 0.0;  // largest deviation in the checked direction; 0 when none
  double seconds = 0.0;
  std::vector<std::string> notes;  // first few failing cases
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 0;  // 0 means the suite default
  double gaussian_perturbation = 0.0;  // added to every analytic Gaussian term (harness hook)
  std::size_t mc_samples = 100'000;
  std::size_t codebook_trials = 100'000;
  int threads = 1;
};

// class-equivalence, swz, supermodular, mc, codebook, matrix-lemma
const std::vector<std::string>& suite_names();
std::size_t default_instances(const std::string& suite);

// Instance i of a suite draws from split_seed(seed, i). Throws ValidationError
// for an unknown suite name.
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts);

// Largest violation of: sum of the extreme point equals g+(K); dominating
// fronthaul below the extreme point; dominating sum-rate at least r_sum.
double ordering_invariant_violation(const OrderingResult& r, double r_sum);

}  // namespace ocran
