#include "ocran/gaussian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ocran/error.hpp"
#include "ocran/parallel.hpp"

namespace ocran {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string relay_label(int k) { return "relay " + std::to_string(k + 1); }
std::string user_label(int l) { return "user " + std::to_string(l + 1); }

void require_hermitian(CMatrix& m, const std::string& what) {
  if (m.rows() != m.cols()) throw ValidationError(what + ": matrix is not square");
  if (hermitian_defect(m) > kHermitianTol) throw ValidationError(what + ": matrix is not Hermitian");
  m = hermitian_part(m);
}

// Horizontal concatenation of H[k][l] over l in T.
CMatrix stacked_channel(const GaussianScenario& sc, int k, Mask users) {
  Eigen::Index cols = 0;
  for (int l : members(users)) cols += sc.user_antennas(l);
  CMatrix h(sc.relay_antennas(k), cols);
  Eigen::Index c = 0;
  for (int l : members(users)) {
    h.middleCols(c, sc.user_antennas(l)) = sc.channel[k][l];
    c += sc.user_antennas(l);
  }
  return h;
}

CMatrix input_cov_sqrt(const GaussianScenario& sc, Mask users) {
  std::vector<CMatrix> blocks;
  for (int l : members(users)) blocks.push_back(sqrt_psd(sc.input_cov[l]));
  return block_diagonal(blocks);
}

void check_pair(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair) {
  if (pair.users == 0) throw ValidationError("rate constraint: user set T must be nonempty");
  if ((pair.users & ~full_mask(sc.num_users())) != 0 || (pair.relays & ~full_mask(sc.num_relays())) != 0) {
    throw ValidationError("rate constraint: subset out of range");
  }
  if (static_cast<int>(q.b.size()) != sc.num_relays()) {
    throw ValidationError("rate constraint: expected " + std::to_string(sc.num_relays()) + " quantizers");
  }
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (q.b[k].rows() != sc.relay_antennas(k) || q.b[k].cols() != sc.relay_antennas(k)) {
      throw ValidationError("rate constraint: B for " + relay_label(k) + " has the wrong dimension");
    }
  }
}

}  // namespace

void GaussianScenario::validate() {
  const int k_count = num_relays();
  const int l_count = num_users();
  if (k_count < 1) throw ValidationError("relays: at least one relay is required");
  if (l_count < 1) throw ValidationError("users: at least one user is required");
  if (static_cast<int>(fronthaul.size()) != k_count) throw ValidationError("fronthaul: expected one entry per relay");
  if (static_cast<int>(power.size()) != l_count) throw ValidationError("power: expected one entry per user");
  if (static_cast<int>(channel.size()) != k_count) throw ValidationError("H: expected one row of matrices per relay");
  for (int k = 0; k < k_count; ++k) {
    if (!(fronthaul[k] >= 0.0) || !std::isfinite(fronthaul[k])) {
      throw ValidationError("fronthaul: capacity of " + relay_label(k) + " must be finite and nonnegative");
    }
    require_hermitian(noise_cov[k], "Sigma of " + relay_label(k));
    if (noise_cov[k].rows() < 1) throw ValidationError("Sigma of " + relay_label(k) + ": empty matrix");
    if (!(min_eigenvalue(noise_cov[k]) > 1e-12)) {
      throw ValidationError("Sigma of " + relay_label(k) + ": not positive definite");
    }
  }
  for (int l = 0; l < l_count; ++l) {
    if (!(power[l] >= 0.0) || !std::isfinite(power[l])) {
      throw ValidationError("power: budget of " + user_label(l) + " must be finite and nonnegative");
    }
    require_hermitian(input_cov[l], "Kin of " + user_label(l));
    if (input_cov[l].rows() < 1) throw ValidationError("Kin of " + user_label(l) + ": empty matrix");
    if (min_eigenvalue(input_cov[l]) < -1e-10) {
      throw ValidationError("Kin of " + user_label(l) + ": not positive semidefinite");
    }
    if (input_cov[l].trace().real() > power[l] + 1e-9) {
      throw ValidationError("Kin of " + user_label(l) + ": trace exceeds the power budget");
    }
  }
  for (int k = 0; k < k_count; ++k) {
    if (static_cast<int>(channel[k].size()) != l_count) {
      throw ValidationError("H: " + relay_label(k) + " needs one matrix per user");
    }
    for (int l = 0; l < l_count; ++l) {
      if (channel[k][l].rows() != relay_antennas(k) || channel[k][l].cols() != user_antennas(l)) {
        throw ValidationError("H: matrix for " + relay_label(k) + ", " + user_label(l) + " has the wrong shape");
      }
    }
  }
}

void validate_quantizers(const GaussianScenario& sc, QuantizerSetGaussian& q) {
  if (static_cast<int>(q.b.size()) != sc.num_relays()) {
    throw ValidationError("B: expected " + std::to_string(sc.num_relays()) + " matrices");
  }
  for (int k = 0; k < sc.num_relays(); ++k) {
    require_hermitian(q.b[k], "B of " + relay_label(k));
    if (q.b[k].rows() != sc.relay_antennas(k)) {
      throw ValidationError("B of " + relay_label(k) + ": dimension does not match Sigma");
    }
    CMatrix root = sqrt_psd(sc.noise_cov[k]);
    Eigen::VectorXd ev = hermitian_eigenvalues(root * q.b[k] * root);
    if (ev.minCoeff() < -1e-10 || ev.maxCoeff() > 1.0 + 1e-10) {
      throw ValidationError("B of " + relay_label(k) + ": must satisfy 0 <= B <= Sigma^{-1}");
    }
  }
}

QuantizerSetGaussian zero_quantizers(const GaussianScenario& sc) {
  QuantizerSetGaussian q;
  for (int k = 0; k < sc.num_relays(); ++k) {
    q.b.push_back(CMatrix::Zero(sc.relay_antennas(k), sc.relay_antennas(k)));
  }
  return q;
}

double fronthaul_mi(const CMatrix& sigma, const CMatrix& b) {
  if (sigma.rows() != sigma.cols() || b.rows() != sigma.rows() || b.cols() != sigma.cols()) {
    throw ValidationError("fronthaul_mi: dimension mismatch");
  }
  if (!is_hermitian(sigma) || !is_hermitian(b)) throw ValidationError("fronthaul_mi: inputs must be Hermitian");
  CMatrix root = sqrt_psd(sigma);
  CMatrix s = hermitian_part(root * b * root);
  if (max_eigenvalue(s) > 1.0 - 1e-12) return kInf;
  CMatrix gap = identity(s.rows()) - s;
  return std::max(0.0, -nats_to_bits(logdet_psd(gap)));
}

TestChannel b_from_test_channel(const CMatrix& sigma, const CMatrix& qn) {
  if (!is_hermitian(sigma) || !is_hermitian(qn) || sigma.rows() != qn.rows()) {
    throw ValidationError("b_from_test_channel: inputs must be Hermitian of equal size");
  }
  CMatrix total = hermitian_part(sigma + qn);
  Eigen::LLT<CMatrix> llt(total);
  if (llt.info() != Eigen::Success || min_eigenvalue(total) <= 0.0) {
    throw NumericError("b_from_test_channel: Sigma + Q is singular");
  }
  TestChannel out;
  out.b = hermitian_part(llt.solve(identity(total.rows())));
  CMatrix s = hermitian_part(sigma);
  out.mmse = hermitian_part(s - s * out.b * s);
  return out;
}

double information_term_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair) {
  check_pair(sc, q, pair);
  CMatrix k_root = input_cov_sqrt(sc, pair.users);
  CMatrix acc = CMatrix::Zero(k_root.rows(), k_root.cols());
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (has(pair.relays, k)) continue;
    CMatrix h = stacked_channel(sc, k, pair.users);
    acc += h.adjoint() * q.b[k] * h;
  }
  CMatrix m = identity(acc.rows()) + k_root * acc * k_root;
  return nats_to_bits(logdet_psd(m));
}

double rate_constraint_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair) {
  check_pair(sc, q, pair);
  double value = 0.0;
  for (int k : members(pair.relays)) {
    double mi = fronthaul_mi(sc.noise_cov[k], q.b[k]);
    if (std::isinf(mi)) return -kInf;
    value += sc.fronthaul[k] - mi;
  }
  return value + information_term_gaussian(sc, q, pair);
}

std::vector<CMatrix> rate_constraint_gradient(const GaussianScenario& sc, const QuantizerSetGaussian& q,
                                              SubsetPair pair) {
  check_pair(sc, q, pair);
  std::vector<CMatrix> grad(static_cast<std::size_t>(sc.num_relays()));
  CMatrix k_root = input_cov_sqrt(sc, pair.users);
  CMatrix acc = CMatrix::Zero(k_root.rows(), k_root.cols());
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (has(pair.relays, k)) continue;
    CMatrix h = stacked_channel(sc, k, pair.users);
    acc += h.adjoint() * q.b[k] * h;
  }
  CMatrix m_inv = (identity(acc.rows()) + k_root * acc * k_root).inverse();
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (has(pair.relays, k)) {
      CMatrix gap = sc.noise_cov[k].inverse() - q.b[k];
      grad[k] = hermitian_part(-gap.inverse()) / kLn2;
    } else {
      CMatrix h = stacked_channel(sc, k, pair.users);
      grad[k] = hermitian_part(h * k_root * m_inv * k_root * h.adjoint()) / kLn2;
    }
  }
  return grad;
}

RateRegion region_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q, int threads) {
  RateRegion region;
  region.num_users = sc.num_users();
  region.num_relays = sc.num_relays();
  auto pairs = enumerate_constraint_pairs(sc.num_users(), sc.num_relays());
  region.constraints.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    region.constraints[i] = {pairs[i], rate_constraint_gaussian(sc, q, pairs[i])};
  });
  return region;
}

double sum_rate_bound_gaussian(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  const Mask all = full_mask(sc.num_users());
  double best = kInf;
  for (Mask s = 0; s <= full_mask(sc.num_relays()); ++s) {
    best = std::min(best, rate_constraint_gaussian(sc, q, {all, s}));
  }
  return best;
}

double matrix_lemma_gap(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  if (a.rows() != b.rows() || b.rows() != c.rows() || !is_hermitian(a) || !is_hermitian(b) || !is_hermitian(c)) {
    throw ValidationError("matrix_lemma: inputs must be Hermitian of equal size");
  }
  if (min_eigenvalue(b - a) < -1e-10) throw ValidationError("matrix_lemma: requires B >= A");
  CMatrix root = sqrt_psd(c);
  const auto n = a.rows();
  double with_b = logdet_psd(identity(n) + root * b * root);
  double with_a = logdet_psd(identity(n) + root * a * root);
  return nats_to_bits(with_b - with_a);
}

bool matrix_lemma_check(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  return matrix_lemma_gap(a, b, c) >= -1e-10;
}

namespace {

std::vector<double> normalized_weights(std::size_t n, std::span<const double> weights) {
  if (n == 0 || weights.size() != n) throw ValidationError("matrix mean: need one weight per matrix");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("matrix mean: weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("matrix mean: weights sum to zero");
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= total;
  return out;
}

}  // namespace

CMatrix arithmetic_mean(std::span<const CMatrix> mats, std::span<const double> weights) {
  auto w = normalized_weights(mats.size(), weights);
  CMatrix acc = CMatrix::Zero(mats[0].rows(), mats[0].cols());
  for (std::size_t i = 0; i < mats.size(); ++i) acc += w[i] * mats[i];
  return hermitian_part(acc);
}

CMatrix harmonic_mean(std::span<const CMatrix> mats, std::span<const double> weights) {
  auto w = normalized_weights(mats.size(), weights);
  CMatrix acc = CMatrix::Zero(mats[0].rows(), mats[0].cols());
  for (std::size_t i = 0; i < mats.size(); ++i) acc += w[i] * mats[i].inverse();
  return hermitian_part(hermitian_part(acc).inverse());
}

GaussianScenario without_relay(const GaussianScenario& sc, int k) {
  GaussianScenario out = sc;
  out.channel.erase(out.channel.begin() + k);
  out.noise_cov.erase(out.noise_cov.begin() + k);
  out.fronthaul.erase(out.fronthaul.begin() + k);
  return out;
}

QuantizerSetGaussian without_relay(const QuantizerSetGaussian& q, int k) {
  QuantizerSetGaussian out = q;
  out.b.erase(out.b.begin() + k);
  return out;
}

}  // namespace ocran
