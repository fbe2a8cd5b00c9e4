#include "ocran/random_instances.hpp"

#include <algorithm>

namespace ocran {

namespace {

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

void append(std::vector<double>& out, const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); }

CMatrix random_unitary(Rng& rng, Eigen::Index n) {
  CMatrix g = random_complex_matrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * identity(n);
}

}  // namespace

DiscreteScenario random_discrete_scenario(Rng& rng, const DiscreteShape& shape) {
  DiscreteScenario sc;
  sc.time_share = dirichlet(static_cast<std::size_t>(shape.q), 1.0, rng);
  sc.input_sizes.assign(static_cast<std::size_t>(shape.users), shape.x);
  sc.output_sizes.assign(static_cast<std::size_t>(shape.relays), shape.y);
  for (int l = 0; l < shape.users; ++l) {
    std::vector<double> table;
    for (int q = 0; q < shape.q; ++q) append(table, dirichlet(static_cast<std::size_t>(shape.x), 1.0, rng));
    sc.input_pmf.push_back(std::move(table));
  }
  const std::size_t xt = sc.input_tuples();
  const std::size_t yt = sc.output_tuples();
  sc.channel.reserve(xt * yt);
  for (std::size_t xi = 0; xi < xt; ++xi) {
    if (!shape.factorizing) {
      append(sc.channel, dirichlet(yt, 1.0, rng));
      continue;
    }
    std::vector<std::vector<double>> per_relay;
    for (int k = 0; k < shape.relays; ++k) per_relay.push_back(dirichlet(static_cast<std::size_t>(shape.y), 1.0, rng));
    for (std::size_t yi = 0; yi < yt; ++yi) {
      double p = 1.0;
      std::size_t rest = yi;
      for (int k = shape.relays - 1; k >= 0; --k) {
        p *= per_relay[k][rest % static_cast<std::size_t>(shape.y)];
        rest /= static_cast<std::size_t>(shape.y);
      }
      sc.channel.push_back(p);
    }
    // Renormalize the row against rounding in the product.
    double total = 0.0;
    for (std::size_t yi = 0; yi < yt; ++yi) total += sc.channel[xi * yt + yi];
    for (std::size_t yi = 0; yi < yt; ++yi) sc.channel[xi * yt + yi] /= total;
  }
  for (int k = 0; k < shape.relays; ++k) sc.fronthaul.push_back(uniform01(rng) * shape.max_fronthaul);
  return sc;
}

AuxChannels random_aux(Rng& rng, const DiscreteScenario& sc, const std::vector<int>& sizes) {
  AuxChannels aux;
  aux.sizes = sizes;
  for (int k = 0; k < sc.num_relays(); ++k) {
    std::vector<double> table;
    for (int q = 0; q < sc.num_q(); ++q) {
      for (int y = 0; y < sc.output_sizes[k]; ++y) append(table, dirichlet(static_cast<std::size_t>(sizes[k]), 1.0, rng));
    }
    aux.table.push_back(std::move(table));
  }
  return aux;
}

AuxChannels identity_aux(const DiscreteScenario& sc, const std::vector<int>& sizes) {
  AuxChannels aux;
  aux.sizes = sizes;
  for (int k = 0; k < sc.num_relays(); ++k) {
    const auto us = static_cast<std::size_t>(sizes[k]);
    std::vector<double> table(static_cast<std::size_t>(sc.num_q()) * sc.output_sizes[k] * us, 0.0);
    for (int q = 0; q < sc.num_q(); ++q) {
      for (int y = 0; y < sc.output_sizes[k]; ++y) {
        table[(static_cast<std::size_t>(q) * sc.output_sizes[k] + y) * us + static_cast<std::size_t>(y) % us] = 1.0;
      }
    }
    aux.table.push_back(std::move(table));
  }
  return aux;
}

AuxChannels constant_aux(const DiscreteScenario& sc) {
  AuxChannels aux;
  aux.sizes.assign(static_cast<std::size_t>(sc.num_relays()), 1);
  for (int k = 0; k < sc.num_relays(); ++k) {
    aux.table.emplace_back(static_cast<std::size_t>(sc.num_q()) * sc.output_sizes[k], 1.0);
  }
  return aux;
}

CMatrix random_complex_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal(rng);
  }
  return m;
}

CMatrix random_pd(Rng& rng, Eigen::Index n, double lo, double hi) {
  CMatrix u = random_unitary(rng, n);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = lo + (hi - lo) * uniform01(rng);
  return hermitian_part(u * d.cast<std::complex<double>>().asDiagonal() * u.adjoint());
}

CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank) {
  CMatrix g = random_complex_matrix(rng, n, rank);
  return hermitian_part(g * g.adjoint());
}

GaussianScenario random_gaussian_scenario(Rng& rng, const GaussianShape& shape) {
  GaussianScenario sc;
  std::vector<int> n_ant;
  std::vector<int> m_ant;
  for (int l = 0; l < shape.users; ++l) n_ant.push_back(uniform_int(rng, 1, shape.max_user_antennas));
  for (int k = 0; k < shape.relays; ++k) m_ant.push_back(uniform_int(rng, 1, shape.max_relay_antennas));
  for (int l = 0; l < shape.users; ++l) {
    double p = 0.5 + 1.5 * uniform01(rng);
    CMatrix k = random_pd(rng, n_ant[l], 0.2, 1.0);
    k *= p / k.trace().real();
    sc.input_cov.push_back(hermitian_part(k));
    sc.power.push_back(p);
  }
  for (int k = 0; k < shape.relays; ++k) {
    sc.noise_cov.push_back(random_pd(rng, m_ant[k], 0.5, 1.5));
    std::vector<CMatrix> row;
    for (int l = 0; l < shape.users; ++l) row.push_back(random_complex_matrix(rng, m_ant[k], n_ant[l]));
    sc.channel.push_back(std::move(row));
    sc.fronthaul.push_back(uniform01(rng) * shape.max_fronthaul);
  }
  return sc;
}

QuantizerSetGaussian random_quantizers(Rng& rng, const GaussianScenario& sc, double lo, double hi) {
  QuantizerSetGaussian q;
  for (int k = 0; k < sc.num_relays(); ++k) {
    CMatrix g = random_pd(rng, sc.relay_antennas(k), lo, hi);
    CMatrix root = inv_sqrt_pd(sc.noise_cov[k]);
    q.b.push_back(hermitian_part(root * g * root));
  }
  return q;
}

}  // namespace ocran
