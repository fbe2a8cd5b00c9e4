#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ocran/error.hpp"
#include "ocran/optimize.hpp"
#include "ocran/random_instances.hpp"
#include "ocran/scenario.hpp"
#include "ocran/sumrate.hpp"

using namespace ocran;

namespace {

const std::filesystem::path data_dir = OCRAN_TEST_DATA;

GaussianScenario scalar(double c, double snr) {
  GaussianScenario sc;
  sc.channel = {{CMatrix::Constant(1, 1, 1.0)}};
  sc.noise_cov = {CMatrix::Constant(1, 1, 1.0)};
  sc.input_cov = {CMatrix::Constant(1, 1, snr)};
  sc.power = {snr};
  sc.fronthaul = {c};
  sc.validate();
  return sc;
}

bool feasible(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  for (int k = 0; k < sc.num_relays(); ++k) {
    CMatrix g = sqrt_psd(sc.noise_cov[k]) * q.b[k] * sqrt_psd(sc.noise_cov[k]);
    if (min_eigenvalue(g) < -1e-9 || max_eigenvalue(g) > 1.0 - 1e-10) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("golden scalar optimum") {
  OptimizerConfig cfg;
  auto opt = optimize_gaussian_quantizers(scalar(1.0, 1.0), cfg);
  CHECK(opt.objective == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-6));
  CHECK(opt.objective == doctest::Approx(oracle::golden_bisection(1.0, 1.0)).epsilon(1e-6));
  CHECK(opt.converged);
  // both constraints are tight at the optimum
  CHECK(opt.active.size() == 2);
}

TEST_CASE("optimizer methods agree on a scalar relay") {
  auto sc = scalar(0.5, 4.0);
  const double want = oracle::golden_bisection(0.5, 4.0);
  for (Method m : {Method::projected_gradient, Method::coordinate_ascent, Method::grid}) {
    OptimizerConfig cfg;
    cfg.method = m;
    cfg.max_iters = 2000;
    auto opt = optimize_gaussian_quantizers(sc, cfg);
    CHECK(opt.objective <= want + 1e-9);
    CHECK(opt.objective == doctest::Approx(want).epsilon(m == Method::grid ? 1e-2 : 1e-5));
  }
}

TEST_CASE("zero fronthaul collapses the optimum") {
  Rng rng(301);
  GaussianShape shape;
  shape.users = 2;
  shape.relays = 2;
  auto sc = random_gaussian_scenario(rng, shape);
  sc.fronthaul = {0.0, 0.0};
  OptimizerConfig cfg;
  auto opt = optimize_gaussian_quantizers(sc, cfg);
  CHECK(opt.objective == doctest::Approx(0.0).epsilon(1e-12));
  auto region = region_gaussian(sc, opt.quantizers);
  CHECK(region.max_sum_rate() <= 1e-9);
  for (double r : region.per_user_max()) CHECK(r <= 1e-9);
}

TEST_CASE("optimizer is deterministic and feasible") {
  Rng rng(303);
  GaussianShape shape;
  shape.users = 2;
  shape.relays = 2;
  auto sc = random_gaussian_scenario(rng, shape);
  OptimizerConfig cfg;
  cfg.seed = 9;
  cfg.max_iters = 200;
  auto a = optimize_gaussian_quantizers(sc, cfg);
  auto b = optimize_gaussian_quantizers(sc, cfg);
  cfg.threads = 3;
  auto c = optimize_gaussian_quantizers(sc, cfg);
  CHECK(a.objective == b.objective);
  CHECK(a.objective == c.objective);
  CHECK(a.trace == c.trace);
  for (int k = 0; k < 2; ++k) CHECK(a.quantizers.b[k] == c.quantizers.b[k]);
  CHECK(feasible(sc, a.quantizers));
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] >= a.trace[i - 1] - 1e-12);
  CHECK(a.objective >= sum_rate_bound_gaussian(sc, zero_quantizers(sc)) - 1e-12);
}

TEST_CASE("weighted objective equals the LP over the region") {
  Rng rng(307);
  for (int i = 0; i < 30; ++i) {
    GaussianShape shape;
    shape.users = 2 + i % 2;
    shape.relays = 2;
    auto sc = random_gaussian_scenario(rng, shape);
    auto q = random_quantizers(rng, sc, 0.0, 0.9);
    OptimizerConfig cfg;
    cfg.objective = Objective::weighted;
    cfg.weights = dirichlet(static_cast<std::size_t>(shape.users), 1.0, rng);
    auto region = region_gaussian(sc, q);
    const double value = gaussian_objective(sc, q, cfg);
    if (region.empty()) {
      CHECK(value == -INFINITY);
      continue;
    }
    auto x = region.max_weighted(cfg.weights);
    double lp = 0.0;
    for (int l = 0; l < shape.users; ++l) lp += cfg.weights[l] * x[l];
    CHECK(value == doctest::Approx(lp).epsilon(1e-9));
  }
}

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  cfg.objective = Objective::weighted;
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
  cfg.weights = {1.0, -1.0};
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
  cfg.weights = {1.0, 1.0};
  CHECK_NOTHROW(cfg.validate(2));
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(2), ValidationError);
}

TEST_CASE("parameter map round trip and projection") {
  Rng rng(311);
  GaussianShape shape;
  shape.relays = 2;
  shape.max_relay_antennas = 3;
  auto sc = random_gaussian_scenario(rng, shape);
  auto q = random_quantizers(rng, sc, 0.1, 0.9);
  auto p = quantizer_params(sc, q);
  auto back = quantizers_from_params(sc, p);
  for (int k = 0; k < 2; ++k) CHECK((back.b[k] - q.b[k]).norm() < 1e-10);
  for (double& v : p) v *= 5.0;
  auto projected = quantizers_from_params(sc, project_params(sc, p));
  CHECK(feasible(sc, projected));
}

TEST_CASE("two antenna relay optimum against the signal covariance") {
  // Logged observation: with white noise the optimal B tends to share an
  // eigenbasis with H K H^H. Only reported, never asserted.
  Rng rng(313);
  GaussianScenario sc;
  sc.channel = {{random_complex_matrix(rng, 2, 2)}};
  sc.noise_cov = {CMatrix::Identity(2, 2)};
  sc.input_cov = {CMatrix::Identity(2, 2)};
  sc.power = {2.0};
  sc.fronthaul = {2.0};
  sc.validate();
  OptimizerConfig cfg;
  auto opt = optimize_gaussian_quantizers(sc, cfg);
  CMatrix s = sc.channel[0][0] * sc.input_cov[0] * sc.channel[0][0].adjoint();
  const double residual = (opt.quantizers.b[0] * s - s * opt.quantizers.b[0]).norm();
  MESSAGE("commutator norm " << residual);
  CHECK(feasible(sc, opt.quantizers));
}

TEST_CASE("finite differences") {
  // quadratic sanity check
  auto f = [](const std::vector<double>& x) { return 3 * x[0] * x[0] + x[0] * x[1] - 2 * x[1]; };
  auto g = [](const std::vector<double>& x) { return std::vector<double>{6 * x[0] + x[1], x[0] - 2}; };
  CHECK(finite_diff_check(f, g, {0.3, -1.2}).max_rel_error <= 1e-8);

  // fronthaul term at b = 0.5: d/db [-log2(1 - b)] = 1 / ((1 - b) ln 2) = 2.885 bits
  auto fb = [](const std::vector<double>& x) {
    return fronthaul_mi(CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, x[0]));
  };
  auto gb = [](const std::vector<double>& x) { return std::vector<double>{1.0 / ((1.0 - x[0]) * std::log(2.0))}; };
  auto chk = finite_diff_check(fb, gb, {0.5});
  CHECK(chk.numeric[0] == doctest::Approx(2.885).epsilon(1e-3));
  CHECK(chk.max_rel_error <= 1e-5);
}

TEST_CASE("sum objective gradient on smooth branches") {
  Rng rng(317);
  int conclusive = 0;
  for (int i = 0; i < 30; ++i) {
    GaussianShape shape;
    shape.users = 1 + i % 2;
    shape.relays = 1 + i % 3;
    auto sc = random_gaussian_scenario(rng, shape);
    auto q = random_quantizers(rng, sc, 0.1, 0.8);
    auto chk = sum_objective_gradient_check(sc, q);
    if (chk.inconclusive) continue;
    ++conclusive;
    CHECK(chk.max_rel_error <= 1e-5);
  }
  CHECK(conclusive >= 15);
  // exactly at the golden optimum the two branches tie
  auto sc = scalar(1.0, 1.0);
  QuantizerSetGaussian q{{CMatrix::Constant(1, 1, 1.0 / 3.0)}};
  CHECK(sum_objective_gradient_check(sc, q).inconclusive);
}

TEST_CASE("monte carlo information term") {
  auto sc = scalar(1.0, 1.0);
  QuantizerSetGaussian q{{CMatrix::Constant(1, 1, 0.5)}};
  auto small = mc_mutual_information(sc, q, {1, 0}, 10000, 1);
  auto large = mc_mutual_information(sc, q, {1, 0}, 1000000, 1);
  const double exact = std::log2(1.5);
  CHECK(std::abs(large.mean_bits - exact) <= 3 * large.std_error_bits);
  const double ratio = small.std_error_bits / large.std_error_bits;
  CHECK(ratio > 5.0);
  CHECK(ratio < 20.0);
  CHECK(mc_mutual_information(sc, q, {1, 1}, 100, 1).mean_bits == 0.0);
  QuantizerSetGaussian edge{{CMatrix::Constant(1, 1, 1.0)}};
  CHECK_THROWS_AS(mc_mutual_information(sc, edge, {1, 0}, 100, 1), ValidationError);
  auto again = mc_mutual_information(sc, q, {1, 0}, 10000, 1);
  CHECK(again.mean_bits == small.mean_bits);
}

TEST_CASE("discrete optimizer on a binary symmetric channel") {
  Scenario s = load_scenario(data_dir / "bsc_no_aux.json");
  DiscreteScenario sc = s.discrete();
  const double capacity = 1.0 - oracle::binary_entropy(0.11);
  OptimizerConfig cfg;
  cfg.restarts = 2;

  sc.fronthaul = {50.0};
  auto rich = optimize_discrete_aux(sc, {2}, cfg);
  CHECK(rich.objective <= capacity + 1e-9);
  CHECK(rich.objective == doctest::Approx(capacity).epsilon(1e-3));

  sc.fronthaul = {0.0};
  CHECK(optimize_discrete_aux(sc, {2}, cfg).objective == doctest::Approx(0.0).epsilon(1e-12));

  sc.fronthaul = {0.5};
  auto mid = optimize_discrete_aux(sc, {2}, cfg);
  CHECK(mid.objective <= capacity + 1e-9);
  CHECK(mid.objective >= jd_sum_rate(sc, identity_aux(sc, {2})) - 1e-12);
  CHECK(mid.objective == doctest::Approx(jd_sum_rate(sc, mid.aux)).epsilon(1e-12));
  CHECK_NOTHROW(validate_aux(sc, mid.aux));
}

TEST_CASE("discrete optimizer stays below the cut-set") {
  Rng rng(331);
  for (int i = 0; i < 5; ++i) {
    DiscreteShape shape;
    shape.users = 1;
    shape.relays = 2;
    auto sc = random_discrete_scenario(rng, shape);
    OptimizerConfig cfg;
    cfg.restarts = 2;
    auto opt = optimize_discrete_aux(sc, {2, 2}, cfg);
    // I(X;Y_1 Y_2 | Q) with transparent relays bounds every sum rate
    auto big = sc;
    big.fronthaul = {100.0, 100.0};
    const double cut = jd_sum_rate(big, identity_aux(big, {2, 2}));
    CHECK(opt.objective <= cut + 1e-9);
    CHECK(opt.objective <= sc.fronthaul[0] + sc.fronthaul[1] + 1e-9);
    CHECK(opt.objective >= 0.0);
  }
}
