#pragma once

#include <span>
#include <vector>

#include "ocran/linalg.hpp"
#include "ocran/region.hpp"
#include "ocran/subset.hpp"

namespace ocran {

// Y_k = sum_l H[k][l] X_l + N_k with N_k ~ CN(0, Sigma_k) independent across
// relays and X_l ~ CN(0, K_l). Rates and capacities are in bits.
struct GaussianScenario {
  std::vector<std::vector<CMatrix>> channel;  // [k][l], M_k x N_l
  std::vector<CMatrix> noise_cov;             // Sigma_k, M_k x M_k
  std::vector<CMatrix> input_cov;             // K_l, N_l x N_l
  std::vector<double> power;                  // P_l
  std::vector<double> fronthaul;              // C_k

  int num_users() const { return static_cast<int>(input_cov.size()); }
  int num_relays() const { return static_cast<int>(noise_cov.size()); }
  Eigen::Index relay_antennas(int k) const { return noise_cov[k].rows(); }
  Eigen::Index user_antennas(int l) const { return input_cov[l].rows(); }

  // Checks dimensions and invariants, replacing near-Hermitian matrices by
  // their Hermitian part. Throws ValidationError naming the offending item.
  void validate();
};

// Per-relay quantization matrices with 0 <= B_k <= Sigma_k^{-1}.
struct QuantizerSetGaussian {
  std::vector<CMatrix> b;
};

void validate_quantizers(const GaussianScenario& sc, QuantizerSetGaussian& q);

// Zero quantizers of the right shapes.
QuantizerSetGaussian zero_quantizers(const GaussianScenario& sc);

// I(Y;U|X) = -log2 det(I - Sigma^{1/2} B Sigma^{1/2}); +inf when B reaches Sigma^{-1}.
double fronthaul_mi(const CMatrix& sigma, const CMatrix& b);

struct TestChannel {
  CMatrix b;     // (Sigma + Q)^{-1}
  CMatrix mmse;  // Sigma - Sigma B Sigma
};

// Quantizer realized by the additive test channel U = Y + Z, Z ~ CN(0, qn).
TestChannel b_from_test_channel(const CMatrix& sigma, const CMatrix& qn);

// Second term of the bound: log2 det(I + K_T^{1/2} (sum_{k in S^c} H_kT^H B_k H_kT) K_T^{1/2}).
double information_term_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair);

// sum_{k in S}[C_k - fronthaul_mi_k] + information term; -inf if any fronthaul_mi is +inf.
double rate_constraint_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair);

// d bound / d B_k as Hermitian matrices D_k with d bound = sum_k tr(D_k dB_k).
std::vector<CMatrix> rate_constraint_gradient(const GaussianScenario& sc, const QuantizerSetGaussian& q,
                                              SubsetPair pair);

RateRegion region_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, int threads = 1);

// Sum-rate bound: min over S of the T = all-users constraint.
double sum_rate_bound_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q);

// log2 det(I + B C) - log2 det(I + A C) for PD A <= B and PD C.
// Throws ValidationError if B - A has an eigenvalue below -1e-10.
double matrix_lemma_gap(const CMatrix& a, const CMatrix& b, const CMatrix& c);
bool matrix_lemma_check(const CMatrix& a, const CMatrix& b, const CMatrix& c);

// Weighted arithmetic and harmonic means of PD matrices.
CMatrix arithmetic_mean(std::span<const CMatrix> mats, std::span<const double> weights);
CMatrix harmonic_mean(std::span<const CMatrix> mats, std::span<const double> weights);

// Copies with relay k removed.
GaussianScenario without_relay(const GaussianScenario& sc, int k);
QuantizerSetGaussian without_relay(const QuantizerSetGaussian& q, int k);

}  // namespace ocran
