#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "dfcr/candidate_test.hpp"
#include "dfcr/resample.hpp"
#include "oracles.hpp"

using namespace dfcr;

namespace {

LabeledSample mixture(std::size_t n, std::uint64_t seed) {
  RngStream r(seed, 77);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = r.uniform01() < 0.5 ? -1.0 : 1.0;
    x[i] = y[i] + r.normal();
  }
  return LabeledSample::from_1d(x, y);
}

std::vector<int> random_permutation(RngStream& r, int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 1);
  for (int i = m - 1; i > 0; --i) std::swap(p[i], p[r.below(i + 1)]);
  return p;
}

}  // namespace

TEST_CASE("init_stem: gamma = 19/20") {
  const StemRandomness s = init_stem(5, 20, 19.0 / 20.0, RngStream(1, 0));
  CHECK(s.q1() == 1);
  CHECK(s.q2() == 19);
  CHECK(s.m() == 20);
  CHECK(s.n() == 5);
  CHECK(s.confidence() == doctest::Approx(0.95));
  for (std::size_t j = 1; j < 20; ++j) {
    REQUIRE(s.perturbations(j).size() == 5);
    for (double u : s.perturbations(j)) {
      CHECK(u > -1.0);
      CHECK(u < 1.0);
    }
  }
  const auto pi = s.permutation();
  CHECK(std::set<int>(pi.begin(), pi.end()) == [] {
    std::set<int> all;
    for (int k = 1; k <= 20; ++k) all.insert(k);
    return all;
  }());
  CHECK_THROWS_AS(s.perturbations(0), std::out_of_range);
  CHECK_THROWS_AS(s.perturbations(20), std::out_of_range);
}

TEST_CASE("init_stem: smallest stem") {
  const StemRandomness s = init_stem(1, 2, 0.5, RngStream(1, 0));
  CHECK(s.q1() == 1);
  CHECK(s.q2() == 1);
}

TEST_CASE("init_stem rejects incompatible levels") {
  CHECK_THROWS_AS(init_stem(5, 20, 0.9371, RngStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(init_stem(5, 20, 1.0, RngStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(init_stem(0, 20, 0.95, RngStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(init_stem_window(5, 20, 3, 2, RngStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(init_stem_window(5, 20, 1, 21, RngStream(1, 0)), std::invalid_argument);
  CHECK_NOTHROW(init_stem_window(5, 20, 1, 20, RngStream(1, 0)));
}

TEST_CASE("stems are reproducible from their stream") {
  const StemRandomness a = init_stem(7, 10, 0.9, RngStream(3, 4));
  const StemRandomness b = init_stem(7, 10, 0.9, RngStream(3, 4));
  for (std::size_t j = 1; j < 10; ++j)
    CHECK(std::equal(a.perturbations(j).begin(), a.perturbations(j).end(),
                     b.perturbations(j).begin()));
  CHECK(std::equal(a.permutation().begin(), a.permutation().end(), b.permutation().begin()));
}

TEST_CASE("stem constructor validates its invariants") {
  CHECK_THROWS_AS(StemRandomness(1, 2, 1, 1, {1.0}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(StemRandomness(1, 2, 1, 1, {0.0}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(StemRandomness(1, 3, 1, 2, {0.0}, {1, 2, 3}), std::invalid_argument);
  const StemRandomness s(1, 3, 1, 2, {0.1, -0.2}, {3, 1, 2});
  CHECK(s.tag(0) == 2);
  CHECK(s.tag(1) == 3);
  CHECK(s.tag(2) == 1);
}

TEST_CASE("saturated candidates give saturated alternative labels") {
  const LabeledSample d = mixture(30, 1);
  const StemRandomness stem = init_stem(30, 20, 0.95, RngStream(2, 0));
  const auto up = generate_alternatives(RegressionModel::constant(1.0), d, stem);
  const auto down = generate_alternatives(RegressionModel::constant(-1.0), d, stem);
  for (std::size_t j = 1; j < 20; ++j)
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(up.labels(j)[i] == 1.0);
      CHECK(down.labels(j)[i] == -1.0);
    }
}

TEST_CASE("alternative labels follow the candidate's conditional law") {
  const int m = 100001;
  const LabeledSample one = LabeledSample::from_1d(std::vector<double>{0.3}, std::vector<double>{1.0});
  const StemRandomness stem = init_stem_window(1, m, 1, m - 1, RngStream(5, 0));
  const auto alts = generate_alternatives(RegressionModel::constant(0.0), one, stem);
  double plus = 0;
  for (int j = 1; j < m; ++j) plus += alts.labels(j)[0] > 0;
  CHECK(std::fabs(plus / (m - 1) - 0.5) <= 0.01);

  // P(+1) = (1 + f) / 2 for f = 0.6
  const auto tilted = generate_alternatives(RegressionModel::constant(0.6), one, stem);
  double plus6 = 0;
  for (int j = 1; j < m; ++j) plus6 += tilted.labels(j)[0] > 0;
  CHECK(std::fabs(plus6 / (m - 1) - 0.8) <= 0.01);
}

TEST_CASE("alternative labels equal sign(f + U) entrywise") {
  const LabeledSample d = mixture(25, 2);
  const StemRandomness stem = init_stem(25, 10, 0.9, RngStream(2, 1));
  const RegressionModel f = RegressionModel::logistic(0.1, {1.3});
  const auto alts = generate_alternatives(f, d, stem);
  for (std::size_t j = 1; j < 10; ++j)
    for (std::size_t i = 0; i < 25; ++i) {
      const double x = d.inputs()(i, 0);
      const double want = f(std::span(&x, 1)) + stem.perturbations(j)[i] >= 0 ? 1.0 : -1.0;
      CHECK(alts.labels(j)[i] == want);
    }
  const auto again = generate_alternatives(f, d, stem);
  for (std::size_t j = 1; j < 10; ++j)
    CHECK(std::equal(alts.labels(j).begin(), alts.labels(j).end(), again.labels(j).begin()));
  const StemRandomness wrong = init_stem(24, 10, 0.9, RngStream(2, 1));
  CHECK_THROWS_AS(generate_alternatives(f, d, wrong), std::invalid_argument);
}

TEST_CASE("rank statistic: direct count") {
  const ReferenceVector z({0.5, 0.1, 0.9, 0.2});
  RngStream r(1, 2);
  for (int t = 0; t < 24; ++t) CHECK(rank_statistic(z, random_permutation(r, 4)) == 3);
}

TEST_CASE("rank statistic: ties resolved by the permutation") {
  const ReferenceVector z({0.0, 0.0, 0.0});
  CHECK(rank_statistic(z, std::vector<int>{2, 3, 1}) == 1);  // pi(3) = 1
  CHECK(rank_statistic(z, std::vector<int>{1, 2, 3}) == 3);  // pi(3) = 3
  CHECK(rank_statistic(z, std::vector<int>{3, 1, 2}) == 2);
}

TEST_CASE("reference vector invariants") {
  CHECK_THROWS_AS(ReferenceVector({0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ReferenceVector({0.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ReferenceVector({0.1, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(rank_statistic(ReferenceVector({0.1, 0.2}), std::vector<int>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("rank agrees with a sorting oracle, and P1 / P2 hold") {
  RngStream r(8, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(r.below(30));
    std::vector<double> z(m);
    // Coarse values so that ties are frequent.
    for (double& v : z) v = static_cast<double>(r.below(5)) * 0.25;
    const auto pi = random_permutation(r, m);

    std::vector<int> ranks;
    for (int pos = 0; pos < m; ++pos) {
      const int k = rank_at(z, pi, pos);
      REQUIRE(k == oracle::sorted_rank(z, pi, pos));
      ranks.push_back(k);
    }
    std::sort(ranks.begin(), ranks.end());
    for (int k = 0; k < m; ++k) REQUIRE(ranks[k] == k + 1);  // P2

    // P1: reorder alternatives 1..m-1 together with their tags.
    std::vector<int> order(m - 1);
    std::iota(order.begin(), order.end(), 1);
    for (int i = m - 2; i > 0; --i) std::swap(order[i], order[r.below(i + 1)]);
    std::vector<double> z2(m);
    std::vector<int> pi2(m);
    z2[0] = z[0];
    pi2[m - 1] = pi[m - 1];
    for (int j = 1; j < m; ++j) {
      z2[j] = z[order[j - 1]];
      pi2[j - 1] = pi[order[j - 1] - 1];
    }
    REQUIRE(rank_at(z2, pi2, 0) == rank_at(z, pi, 0));
  }
}

TEST_CASE("candidate equal to the ERM fit of D0 has Z[0] = 0 and minimal rank") {
  const LabeledSample d = mixture(40, 3);
  const auto basis = legendre_basis(1);
  const RegressionModel fit = linear_erm_fit(d, basis);
  const StemRandomness stem = init_stem(40, 20, 0.95, RngStream(3, 3));
  const RankResult res = test_candidate(fit, d, stem, LinearErmEngine{basis});
  CHECK(res.z[0] == 0.0);
  int zero_ties_below = 0;
  for (std::size_t j = 1; j < res.z.size(); ++j)
    if (res.z[j] == 0.0 && stem.tag(j) < stem.tag(0)) ++zero_ties_below;
  CHECK(res.rank == 1 + zero_ties_below);
  CHECK(res.accepted);
}

TEST_CASE("m = 2, q1 = q2 = 1: accepted exactly when the rank is 1") {
  const LabeledSample d = mixture(15, 4);
  int seen[3] = {0, 0, 0};
  for (std::uint64_t s = 0; s < 200; ++s) {
    const StemRandomness stem = init_stem(15, 2, 0.5, RngStream(s, 9));
    const RankResult res = test_candidate(true_logistic_model(), d, stem, KnnEngine{});
    CHECK(res.accepted == (res.rank == 1));
    ++seen[res.rank];
  }
  CHECK(seen[1] > 0);
  CHECK(seen[2] > 0);
}

TEST_CASE("testing the same candidate twice gives the same result") {
  const LabeledSample d = mixture(50, 5);
  const StemRandomness stem = init_stem(50, 20, 0.95, RngStream(5, 5));
  const PreparedEngine prepared(PerceptronEngine{}, d);
  const RegressionModel cand = RegressionModel::logistic(0.4, {1.1});
  const RankResult a = test_candidate(cand, stem, prepared);
  const RankResult b = test_candidate(cand, stem, prepared);
  CHECK(a.rank == b.rank);
  CHECK(a.accepted == b.accepted);
  for (std::size_t j = 0; j < a.z.size(); ++j) CHECK(a.z[j] == b.z[j]);
  const RankResult c = test_candidate(cand, d, stem, PerceptronEngine{});
  CHECK(c.rank == a.rank);
}

TEST_CASE("acceptance frequency at the true parameter is q2 / m") {
  const int trials = 10000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    // Independent samples and stems: the sample must be redrawn too.
    RngStream gen(1000 + t, 1);
    std::vector<double> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
      y[i] = gen.uniform01() < 0.5 ? -1.0 : 1.0;
      x[i] = y[i] + gen.normal();
    }
    const LabeledSample s = LabeledSample::from_1d(x, y);
    const StemRandomness stem = init_stem(50, 20, 0.95, RngStream(1000 + t, 2));
    hits += test_candidate(true_logistic_model(), s, stem, KnnEngine{}).accepted;
  }
  CHECK(std::fabs(static_cast<double>(hits) / trials - 0.95) <= 0.015);
}
