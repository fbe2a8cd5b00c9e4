#include <doctest.h>

#include <cmath>
#include <set>

#include "ocran/codebook.hpp"
#include "ocran/error.hpp"
#include "ocran/joint_pmf.hpp"
#include "ocran/lp.hpp"
#include "ocran/parallel.hpp"
#include "ocran/random.hpp"
#include "ocran/region.hpp"
#include "ocran/subset.hpp"

using namespace ocran;

TEST_CASE("constraint pairs enumerate T then S by bitmask") {
  auto pairs = enumerate_constraint_pairs(2, 2);
  REQUIRE(pairs.size() == 12);
  CHECK(pairs.front() == SubsetPair{1, 0});
  CHECK(pairs[3] == SubsetPair{1, 3});
  CHECK(pairs[4] == SubsetPair{2, 0});
  CHECK(pairs.back() == SubsetPair{3, 3});
  std::set<std::pair<Mask, Mask>> seen;
  for (const auto& p : pairs) seen.insert({p.users, p.relays});
  CHECK(seen.size() == pairs.size());
}

TEST_CASE("constraint pair guards") {
  CHECK_THROWS_AS(enumerate_constraint_pairs(13, 12), CapacityError);
  CHECK_THROWS_AS(enumerate_constraint_pairs(0, 1), ValidationError);
  CHECK_THROWS_AS(enumerate_constraint_pairs(1, 0), ValidationError);
}

TEST_CASE("set formatting is one based") {
  CHECK(format_set(0) == "{}");
  CHECK(format_set(5) == "{1,3}");
  CHECK(members(6) == std::vector<int>{1, 2});
}

TEST_CASE("splitmix64 reference values") {
  // first outputs of the reference splitmix64 generator seeded with 0
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
  CHECK(split_seed(7, 3) == splitmix64(10));
  CHECK(split_seed(7, 3) != split_seed(7, 4));
}

TEST_CASE("rng helpers") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    auto p = dirichlet(4, 1.0, rng);
    double s = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<double> pmf{0.0, 1.0, 0.0};
  CHECK(sample_index(pmf, rng) == 1);
}

TEST_CASE("joint pmf entropies") {
  // X uniform bit, Y = X through BSC(0.25)
  JointPmf j({2, 2}, {"X", "Y"}, {0.375, 0.125, 0.125, 0.375});
  const double h = -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75);
  CHECK(j.entropy(axis(0)) == doctest::Approx(1.0));
  CHECK(j.entropy(axis(0) | axis(1)) == doctest::Approx(1.0 + h));
  CHECK(cmi(j, axis(0), axis(1), 0) == doctest::Approx(1.0 - h));
  CHECK_THROWS_AS(cmi(j, axis(0), axis(0), 0), ValidationError);
  CHECK_THROWS_AS(JointPmf({2}, {"X"}, {0.5, 0.6}), ValidationError);
  auto m = j.marginal(axis(1));
  CHECK(m[0] == doctest::Approx(0.5));
}

TEST_CASE("lp small instance") {
  // max x + y, x + 2y <= 4, 3x + y <= 6 -> (1.6, 1.2)
  std::vector<double> c{1.0, 1.0};
  std::vector<std::vector<double>> a{{1.0, 2.0}, {3.0, 1.0}};
  std::vector<double> b{4.0, 6.0};
  auto sol = maximize_lp(c, a, b);
  CHECK_FALSE(sol.unbounded);
  CHECK(sol.value == doctest::Approx(2.8));
  CHECK(sol.x[0] == doctest::Approx(1.6));
  CHECK(sol.x[1] == doctest::Approx(1.2));
}

TEST_CASE("lp unbounded") {
  std::vector<double> c{1.0, 1.0};
  std::vector<std::vector<double>> a{{1.0, -1.0}};
  std::vector<double> b{1.0};
  CHECK(maximize_lp(c, a, b).unbounded);
}

namespace {

RateRegion pentagon(double a1, double a2, double a12) {
  RateRegion r;
  r.num_users = 2;
  r.num_relays = 0;
  r.constraints = {{{1, 0}, a1}, {{2, 0}, a2}, {{3, 0}, a12}};
  return r;
}

}  // namespace

TEST_CASE("region queries on a pentagon") {
  auto r = pentagon(1.0, 0.8, 1.5);
  CHECK_FALSE(r.empty());
  CHECK(r.max_sum_rate() == doctest::Approx(1.5));
  auto pu = r.per_user_max();
  CHECK(pu[0] == doctest::Approx(1.0));
  CHECK(pu[1] == doctest::Approx(0.8));
  std::vector<double> in{0.7, 0.8};
  std::vector<double> out{0.8, 0.8};
  CHECK(point_in_region(r, in));
  CHECK_FALSE(point_in_region(r, out));
  std::vector<double> negative{-0.1, 0.0};
  CHECK_THROWS_AS(point_in_region(r, negative), ValidationError);

  auto v1 = two_user_boundary_point(r, 2.0, 1.0);
  CHECK(v1[0] == doctest::Approx(1.0));
  CHECK(v1[1] == doctest::Approx(0.5));
  auto v2 = two_user_boundary_point(r, 1.0, 2.0);
  CHECK(v2[0] == doctest::Approx(0.7));
  CHECK(v2[1] == doctest::Approx(0.8));
  auto mid = two_user_boundary_point(r, 1.0, 1.0);
  CHECK(mid[0] + mid[1] == doctest::Approx(1.5));

  std::vector<double> w{2.0, 1.0};
  auto x = r.max_weighted(w);
  CHECK(2 * x[0] + x[1] == doctest::Approx(2.5));
}

TEST_CASE("empty region") {
  auto r = pentagon(1.0, -0.2, 1.5);
  CHECK(r.empty());
  CHECK(r.max_sum_rate() == -INFINITY);
  std::vector<double> w{1.0, 1.0};
  CHECK_THROWS_AS(r.max_weighted(w), NumericError);
}

TEST_CASE("codebook size and guard") {
  CodebookEnsemble e;
  e.rate_bits = 1.5;
  e.blocklength = 3;
  CHECK(e.codebook_size() == 23);  // ceil(2^4.5)
  e.rate_bits = 10.0;
  CHECK_THROWS_AS(e.codebook_size(), CapacityError);
}

TEST_CASE("codebook marginal matches the input law") {
  CodebookEnsemble e;
  e.rate_bits = 1.0;
  e.blocklength = 3;
  e.input_pmf = {{0.3, 0.7}, {0.6, 0.4}};
  e.time_sequence = {0, 1, 0};
  e.seed = 5;
  auto m = sample_codebook_marginal(e, 20000);
  CHECK(m.max_tv <= 0.03);
  REQUIRE(m.joint_tv.has_value());
  CHECK(*m.joint_tv <= 0.05);
  auto again = sample_codebook_marginal(e, 20000);
  CHECK(again.empirical == m.empirical);

  e.input_pmf = {{0.0, 1.0}};
  e.time_sequence = {0, 0, 0};
  CHECK(sample_codebook_marginal(e, 1000).max_tv == 0.0);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericError("boom");
                               }),
                  NumericError);
}
