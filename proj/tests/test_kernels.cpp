#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <vector>

#include "dfcr/candidate_test.hpp"
#include "dfcr/kernels.hpp"
#include "dfcr/rng.hpp"

using namespace dfcr;
using namespace dfcr::kernels;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

double ulps_apart(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / (std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b)));
}

std::vector<double> random_vec(RngStream& r, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = r.uniform(lo, hi);
  return v;
}

// Elementwise transcendental kernels: within 4 ulps of 1.
const double kTight = 4 * std::numeric_limits<double>::epsilon();

// Sizes around the 4-lane boundaries, plus a long run.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257, 1001};

}  // namespace

TEST_CASE("ISA names round-trip") {
  CHECK(parse_isa("scalar") == Isa::scalar);
  CHECK(parse_isa("avx2") == Isa::avx2);
  CHECK_FALSE(parse_isa("sse9").has_value());
  CHECK(to_string(Isa::avx2) == "avx2");
  CHECK(isa_supported(Isa::scalar));
}

TEST_CASE("select_isa pins the active table") {
  const Isa before = active_isa();
  select_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  if (isa_supported(Isa::avx2)) {
    select_isa(Isa::avx2);
    CHECK(active().isa == Isa::avx2);
  } else {
    CHECK_THROWS_AS(select_isa(Isa::avx2), std::invalid_argument);
  }
  select_isa(before);
}

TEST_CASE("elementwise kernels are bit-identical across ISAs") {
  const KernelTable* v = avx2_table();
  if (!v) {
    MESSAGE("AVX2 unavailable; skipping");
    return;
  }
  const KernelTable& s = scalar_table();
  RngStream r(1, 0);
  for (std::size_t n : kSizes) {
    for (std::size_t d : {1u, 2u, 3u}) {
      const auto cols = random_vec(r, n * d, -3, 3);
      const auto q = random_vec(r, d, -3, 3);
      std::vector<double> a(n), b(n);
      s.squared_distances(cols.data(), n, d, q.data(), a.data());
      v->squared_distances(cols.data(), n, d, q.data(), b.data());
      for (std::size_t i = 0; i < n; ++i) REQUIRE(bit_equal(a[i], b[i]));
      s.affine(cols.data(), n, d, q.data(), 0.25, a.data());
      v->affine(cols.data(), n, d, q.data(), 0.25, b.data());
      for (std::size_t i = 0; i < n; ++i) REQUIRE(bit_equal(a[i], b[i]));
    }
    auto f = random_vec(r, n, -1, 1);
    auto u = random_vec(r, n, -1, 1);
    if (n > 2) {
      f[0] = 0.5;
      u[0] = -0.5;  // exact zero sum maps to +1
      f[1] = 1.0;
      f[2] = -1.0;
    }
    std::vector<double> a(n), b(n);
    s.threshold_signs(f.data(), u.data(), n, a.data());
    v->threshold_signs(f.data(), u.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) REQUIRE(bit_equal(a[i], b[i]));
    if (n > 2) CHECK(a[0] == 1.0);
  }
}

TEST_CASE("reductions agree across ISAs to a few ulps") {
  const KernelTable* v = avx2_table();
  if (!v) return;
  const KernelTable& s = scalar_table();
  RngStream r(2, 0);
  for (std::size_t n : kSizes) {
    const auto a = random_vec(r, n, -2, 2);
    const auto b = random_vec(r, n, -2, 2);
    const auto c = random_vec(r, n, 0, 1);
    if (n == 0) {
      CHECK(v->dot(a.data(), b.data(), 0) == 0.0);
      continue;
    }
    // Bound relative to the sum of absolute products, the natural scale.
    double scale = 0.0, scale3 = 0.0, scale_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale += std::fabs(a[i] * b[i]);
      scale3 += std::fabs(a[i] * b[i] * c[i]);
      scale_m += (a[i] - b[i]) * (a[i] - b[i]);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    CHECK(std::fabs(s.dot(a.data(), b.data(), n) - v->dot(a.data(), b.data(), n)) <=
          8 * eps * scale);
    CHECK(std::fabs(s.dot3(a.data(), b.data(), c.data(), n) -
                    v->dot3(a.data(), b.data(), c.data(), n)) <= 8 * eps * scale3);
    CHECK(ulps_apart(s.mean_squared_diff(a.data(), b.data(), n),
                     v->mean_squared_diff(a.data(), b.data(), n)) <= 8 * std::log2(n + 2.0));
    (void)scale_m;
  }
}

TEST_CASE("logistic kernels agree across ISAs, including extreme arguments") {
  const KernelTable* v = avx2_table();
  if (!v) return;
  const KernelTable& s = scalar_table();
  RngStream r(3, 0);
  for (std::size_t n : kSizes) {
    auto z = random_vec(r, n, -40, 40);
    const double extremes[] = {0.0, -0.0, 1e-300, -1e-300, 700, -700, 710, -710, 1e308, -1e308};
    for (std::size_t i = 0; i < n && i < std::size(extremes); ++i) z[i] = extremes[i];
    std::vector<double> t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = r.uniform01() < 0.5 ? 0.0 : 1.0;
      y[i] = 2.0 * t[i] - 1.0;
    }
    std::vector<double> a(n), b(n), a2(n), b2(n);
    s.logistic_pm1(z.data(), n, a.data());
    v->logistic_pm1(z.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(std::fabs(b[i]) <= 1.0);
      REQUIRE(std::fabs(a[i] - b[i]) <= kTight);
    }
    const double ls = s.lsq_terms(z.data(), y.data(), n, a.data(), a2.data());
    const double lv = v->lsq_terms(z.data(), y.data(), n, b.data(), b2.data());
    CHECK(std::fabs(ls - lv) <= 1e-14 * std::max(1.0, ls));
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(std::fabs(a[i] - b[i]) <= kTight);
      REQUIRE(std::fabs(a2[i] - b2[i]) <= kTight);
    }
    const double bs = s.bernoulli_terms(z.data(), t.data(), n, a.data(), a2.data());
    const double bv = v->bernoulli_terms(z.data(), t.data(), n, b.data(), b2.data());
    if (std::isfinite(bs)) {
      CHECK(std::fabs(bs - bv) <= 1e-13 * std::max(1.0, std::fabs(bs)));
    } else {
      CHECK(bs == bv);
    }
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(std::fabs(a[i] - b[i]) <= kTight);
      REQUIRE(std::fabs(a2[i] - b2[i]) <= kTight);
    }
  }
}

TEST_CASE("scalar logistic kernel matches its definition") {
  const KernelTable& s = scalar_table();
  const std::vector<double> z = {-30, -2.5, -1e-3, 0, 1e-3, 0.7, 3, 30};
  std::vector<double> out(z.size());
  s.logistic_pm1(z.data(), z.size(), out.data());
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(out[i] == doctest::Approx(std::tanh(z[i] / 2)).epsilon(1e-14));
}

TEST_CASE("rank results are identical under either ISA") {
  if (!isa_supported(Isa::avx2)) return;
  const Isa before = active_isa();
  RngStream gen(4, 0);
  std::vector<double> x(60), y(60);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = gen.uniform01() < 0.5 ? -1.0 : 1.0;
    x[i] = y[i] + gen.normal();
  }
  const LabeledSample sample = LabeledSample::from_1d(x, y);
  const StemRandomness stem = init_stem_window(60, 20, 1, 19, RngStream(4, 1));
  const std::vector<RankingEngine> engines = {KnnEngine{}, PerceptronEngine{}, LogisticMleEngine{}};
  for (const auto& engine : engines) {
    for (double b : {-1.0, 0.5, 2.0, 4.0}) {
      const RegressionModel cand = RegressionModel::logistic(0.2, {b});
      select_isa(Isa::scalar);
      const RankResult rs = test_candidate(cand, sample, stem, engine);
      select_isa(Isa::avx2);
      const RankResult rv = test_candidate(cand, sample, stem, engine);
      INFO(engine_name(engine), " b=", b);
      CHECK(rs.rank == rv.rank);
      // Iterative fits stop at slightly different points; kNN is exact.
      const double tol = std::holds_alternative<KnnEngine>(engine) ? 1e-13 : 1e-6;
      for (std::size_t j = 0; j < rs.z.size(); ++j)
        CHECK(rs.z[j] == doctest::Approx(rv.z[j]).epsilon(tol).scale(1e-12));
    }
  }
  select_isa(before);
}
