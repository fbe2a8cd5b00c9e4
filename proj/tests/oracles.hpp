#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's entropy, joint-tensor or Gaussian bound code.

#include <cmath>
#include <map>
#include <vector>

#include "ocran/discrete.hpp"
#include "ocran/gaussian.hpp"

namespace oracle {

using ocran::AuxChannels;
using ocran::CMatrix;
using ocran::DiscreteScenario;
using ocran::GaussianScenario;
using ocran::QuantizerSetGaussian;

// Dense joint over (Q, X_1..X_L, Y_1..Y_K, U_1..U_K), built by explicit loops.
struct Joint {
  std::vector<int> dims;
  std::vector<std::pair<std::vector<int>, double>> atoms;  // nonzero entries only
};

inline bool next_tuple(std::vector<int>& t, const std::vector<int>& dims) {
  for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
    if (++t[i] < dims[i]) return true;
    t[i] = 0;
  }
  return false;
}

inline Joint build(const DiscreteScenario& sc, const AuxChannels& aux) {
  const int L = sc.num_users();
  const int K = sc.num_relays();
  Joint j;
  j.dims.push_back(sc.num_q());
  for (int l = 0; l < L; ++l) j.dims.push_back(sc.input_sizes[l]);
  for (int k = 0; k < K; ++k) j.dims.push_back(sc.output_sizes[k]);
  for (int k = 0; k < K; ++k) j.dims.push_back(aux.sizes[k]);
  std::vector<int> t(j.dims.size(), 0);
  do {
    const int q = t[0];
    double p = sc.time_share[q];
    std::size_t xrow = 0;
    for (int l = 0; l < L; ++l) {
      const int x = t[1 + l];
      p *= sc.input_pmf[l][static_cast<std::size_t>(q) * sc.input_sizes[l] + x];
      xrow = xrow * sc.input_sizes[l] + x;
    }
    std::size_t ycol = 0;
    for (int k = 0; k < K; ++k) ycol = ycol * sc.output_sizes[k] + t[1 + L + k];
    p *= sc.channel[xrow * sc.output_tuples() + ycol];
    for (int k = 0; k < K; ++k) {
      const int y = t[1 + L + k];
      const int u = t[1 + L + K + k];
      p *= aux.table[k][(static_cast<std::size_t>(q) * sc.output_sizes[k] + y) * aux.sizes[k] + u];
    }
    if (p > 0.0) j.atoms.emplace_back(t, p);
  } while (next_tuple(t, j.dims));
  return j;
}

inline double entropy(const Joint& j, const std::vector<int>& axes) {
  std::map<std::vector<int>, double> marg;
  for (const auto& [t, p] : j.atoms) {
    std::vector<int> key;
    for (int a : axes) key.push_back(t[a]);
    marg[key] += p;
  }
  double h = 0.0;
  for (const auto& [k, p] : marg) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline std::vector<int> join(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)
inline double cmi(const Joint& j, const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& c) {
  return entropy(j, join(a, c)) + entropy(j, join(b, c)) - entropy(j, join(join(a, b), c)) - entropy(j, c);
}

struct Axes {
  int L, K;
  std::vector<int> q() const { return {0}; }
  std::vector<int> x(unsigned mask) const {
    std::vector<int> v;
    for (int l = 0; l < L; ++l)
      if (mask >> l & 1u) v.push_back(1 + l);
    return v;
  }
  std::vector<int> y(unsigned mask) const {
    std::vector<int> v;
    for (int k = 0; k < K; ++k)
      if (mask >> k & 1u) v.push_back(1 + L + k);
    return v;
  }
  std::vector<int> u(unsigned mask) const {
    std::vector<int> v;
    for (int k = 0; k < K; ++k)
      if (mask >> k & 1u) v.push_back(1 + L + K + k);
    return v;
  }
};

// sum_{s in S}[C_s - I(Y_s;U_s|X,Q)] + I(X_T;U_{S^c}|X_{T^c},Q)
inline double ci_bound(const DiscreteScenario& sc, const Joint& j, unsigned T, unsigned S) {
  Axes ax{sc.num_users(), sc.num_relays()};
  const unsigned all_x = (1u << ax.L) - 1;
  const unsigned all_k = (1u << ax.K) - 1;
  double v = 0.0;
  for (int k = 0; k < ax.K; ++k) {
    if (S >> k & 1u) v += sc.fronthaul[k] - cmi(j, ax.y(1u << k), ax.u(1u << k), join(ax.x(all_x), ax.q()));
  }
  v += cmi(j, ax.x(T), ax.u(all_k & ~S), join(ax.x(all_x & ~T), ax.q()));
  return v;
}

// sum_{s in S} C_s - I(Y_S;U_S|X,U_{S^c},Q) + I(X_T;U_{S^c}|X_{T^c},Q)
inline double inner_bound(const DiscreteScenario& sc, const Joint& j, unsigned T, unsigned S) {
  Axes ax{sc.num_users(), sc.num_relays()};
  const unsigned all_x = (1u << ax.L) - 1;
  const unsigned all_k = (1u << ax.K) - 1;
  double v = 0.0;
  for (int k = 0; k < ax.K; ++k) {
    if (S >> k & 1u) v += sc.fronthaul[k];
  }
  v -= cmi(j, ax.y(S), ax.u(S), join(join(ax.x(all_x), ax.u(all_k & ~S)), ax.q()));
  v += cmi(j, ax.x(T), ax.u(all_k & ~S), join(ax.x(all_x & ~T), ax.q()));
  return v;
}

inline double jd_sum_rate(const DiscreteScenario& sc, const Joint& j) {
  double best = INFINITY;
  const unsigned all_x = (1u << sc.num_users()) - 1;
  for (unsigned s = 0; s < (1u << sc.num_relays()); ++s) best = std::min(best, inner_bound(sc, j, all_x, s));
  return std::max(best, 0.0);
}

// Gaussian information term through the test channel: with D = blockdiag(B_k^{-1})
// over k outside S, log2 det(D + H_T K_T H_T^H) - log2 det(D). Requires B_k PD.
inline double log2det(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) s += std::log2(es.eigenvalues()(i));
  return s;
}

inline double info_term(const GaussianScenario& sc, const QuantizerSetGaussian& q, unsigned T, unsigned S) {
  std::vector<int> relays;
  for (int k = 0; k < sc.num_relays(); ++k)
    if (!(S >> k & 1u)) relays.push_back(k);
  if (relays.empty()) return 0.0;
  Eigen::Index rows = 0;
  for (int k : relays) rows += sc.noise_cov[k].rows();
  CMatrix d = CMatrix::Zero(rows, rows);
  CMatrix signal = CMatrix::Zero(rows, rows);
  Eigen::Index r0 = 0;
  for (int k : relays) {
    const auto mk = sc.noise_cov[k].rows();
    d.block(r0, r0, mk, mk) = q.b[k].inverse();
    Eigen::Index c0 = 0;
    for (int k2 : relays) {
      const auto mk2 = sc.noise_cov[k2].rows();
      for (int l = 0; l < sc.num_users(); ++l) {
        if (!(T >> l & 1u)) continue;
        signal.block(r0, c0, mk, mk2) += sc.channel[k][l] * sc.input_cov[l] * sc.channel[k2][l].adjoint();
      }
      c0 += mk2;
    }
    r0 += mk;
  }
  return log2det(d + signal) - log2det(d);
}

// I(Y;U|X) = log2 det(B^{-1}) - log2 det(B^{-1} - Sigma), the test-channel form.
inline double fronthaul(const CMatrix& sigma, const CMatrix& b) {
  CMatrix bi = b.inverse();
  return log2det(bi) - log2det(bi - sigma);
}

inline double bound(const GaussianScenario& sc, const QuantizerSetGaussian& q, unsigned T, unsigned S) {
  double v = 0.0;
  for (int k = 0; k < sc.num_relays(); ++k) {
    if (S >> k & 1u) v += sc.fronthaul[k] - fronthaul(sc.noise_cov[k], q.b[k]);
  }
  return v + info_term(sc, q, T, S);
}

// Scalar relay (h = 1, sigma^2 = 1): equalize log2(1 + snr b) and C + log2(1 - b)
// by bisection over b in [0, 1]; returns the common value.
inline double golden_bisection(double C, double snr) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double diff = std::log2(1.0 + snr * mid) - (C + std::log2(1.0 - mid));
    (diff < 0.0 ? lo : hi) = mid;
  }
  return std::log2(1.0 + snr * 0.5 * (lo + hi));
}

inline double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace oracle
