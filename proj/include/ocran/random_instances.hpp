#pragma once

#include <vector>

#include "ocran/discrete.hpp"
#include "ocran/gaussian.hpp"
#include "ocran/random.hpp"

namespace ocran {

// Generators for randomized property checks and the verify suites.

struct DiscreteShape {
  int users = 2;
  int relays = 2;
  int q = 1;
  int x = 2;  // |X_l| for every user
  int y = 2;  // |Y_k| for every relay
  bool factorizing = true;
  double max_fronthaul = 1.5;
};

// Dirichlet(1) rows for p(q), p(x|q) and the channel; with `factorizing` the
// channel is a product of per-relay Dirichlet channels. Fronthaul uniform on
// [0, max_fronthaul].
DiscreteScenario random_discrete_scenario(Rng& rng, const DiscreteShape& shape);

// Dirichlet(1) rows for every p(u_k | y_k, q).
AuxChannels random_aux(Rng& rng, const DiscreteScenario& sc, const std::vector<int>& sizes);

// u_k = y_k mod |U_k| for every q.
AuxChannels identity_aux(const DiscreteScenario& sc, const std::vector<int>& sizes);

// |U_k| = 1 for every relay.
AuxChannels constant_aux(const DiscreteScenario& sc);

CMatrix random_complex_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

// Hermitian PD with eigenvalues uniform in [lo, hi] and a random unitary basis.
CMatrix random_pd(Rng& rng, Eigen::Index n, double lo = 0.2, double hi = 2.0);

// Hermitian PSD of the given rank (sum of rank outer products).
CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank);

struct GaussianShape {
  int users = 1;
  int relays = 1;
  int max_user_antennas = 2;
  int max_relay_antennas = 2;
  double max_fronthaul = 3.0;
};

// Unit-variance complex channel entries, random PD noise, input covariance at
// full power with power uniform on [0.5, 2].
GaussianScenario random_gaussian_scenario(Rng& rng, const GaussianShape& shape);

// B_k = Sigma^{-1/2} G Sigma^{-1/2} with eigenvalues of G uniform on [lo, hi].
QuantizerSetGaussian random_quantizers(Rng& rng, const GaussianScenario& sc, double lo, double hi);

}  // namespace ocran
