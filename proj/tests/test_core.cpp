#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "dfcr/core.hpp"
#include "dfcr/rng.hpp"

using namespace dfcr;

TEST_CASE("logistic model is zero at the origin and saturates") {
  const RegressionModel f = RegressionModel::logistic(0.0, {2.0});
  const double zero = 0.0;
  CHECK(evaluate_model(f, std::span(&zero, 1)) == 0.0);
  for (double x : {20.0, 40.0, 1e3, 1e300}) {
    const double v = f(std::span(&x, 1));
    CHECK(v <= 1.0);
    CHECK(v >= 1.0 - 1e-15);
    const double neg = -x;
    CHECK(f(std::span(&neg, 1)) == doctest::Approx(-1.0).epsilon(1e-15));
  }
  CHECK(true_logistic_model() == f);
}

TEST_CASE("logistic model matches tanh for a = 0, b = 2") {
  const RegressionModel f = true_logistic_model();
  for (double x = -5.0; x <= 5.0; x += 0.37)
    CHECK(f(std::span(&x, 1)) == doctest::Approx(std::tanh(x)).epsilon(1e-14));
}

TEST_CASE("constant model returns its value everywhere") {
  const RegressionModel c = RegressionModel::constant(0.5);
  for (double x : {-3.0, 0.0, 7.5}) CHECK(c(std::span(&x, 1)) == 0.5);
  const std::vector<double> x2 = {1.0, 2.0, 3.0};
  CHECK(c(x2) == 0.5);
  CHECK_THROWS_AS(RegressionModel::constant(1.5), std::invalid_argument);
}

TEST_CASE("dimension mismatch names expected and given dimension") {
  const RegressionModel f = RegressionModel::logistic(0.0, {1.0, 2.0});
  const std::vector<double> x = {1.0};
  try {
    (void)f(x);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }
}

TEST_CASE("every family stays inside [-1, 1]") {
  RngStream rng(7, 0);
  const auto basis = legendre_basis(3);
  for (int trial = 0; trial < 10000; ++trial) {
    const double x = rng.uniform(-50.0, 50.0);
    const double xb = rng.uniform(-1.0, 1.0);
    const RegressionModel lg =
        RegressionModel::logistic(rng.uniform(-100, 100), {rng.uniform(-100, 100)});
    std::vector<double> coef(basis->size());
    for (double& c : coef) c = rng.uniform(-5.0, 5.0);
    const RegressionModel lin = RegressionModel::linear_basis(basis, coef);
    const RegressionModel cst = RegressionModel::constant(rng.uniform(-1.0, 1.0));
    CHECK(std::fabs(lg(std::span(&x, 1))) <= 1.0);
    CHECK(std::fabs(lin(std::span(&xb, 1))) <= 1.0);
    CHECK(std::fabs(cst(std::span(&x, 1))) <= 1.0);
  }
}

TEST_CASE("linear-basis model clamps the raw combination") {
  const RegressionModel lin = RegressionModel::linear_basis(constant_basis(), {3.0});
  const double x = 0.2;
  CHECK(lin(std::span(&x, 1)) == 1.0);
  const RegressionModel neg = RegressionModel::linear_basis(constant_basis(), {-3.0});
  CHECK(neg(std::span(&x, 1)) == -1.0);
}

TEST_CASE("evaluate_rows agrees with pointwise evaluation") {
  RngStream rng(3, 1);
  std::vector<double> xs(103);
  for (double& x : xs) x = rng.normal();
  const InputMatrix in = InputMatrix::from_1d(xs);
  const RegressionModel f = RegressionModel::logistic(-0.3, {1.7});
  const auto rows = f.evaluate_rows(in);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(rows[i] == doctest::Approx(f(std::span(&xs[i], 1))).epsilon(1e-14));
}

TEST_CASE("LabeledSample invariants") {
  const std::vector<double> x = {0.0, 1.0};
  CHECK_NOTHROW(LabeledSample::from_1d(x, std::vector<double>{1.0, -1.0}));
  CHECK_THROWS_AS(LabeledSample::from_1d(x, std::vector<double>{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(LabeledSample::from_1d(x, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LabeledSample::from_1d(std::vector<double>{}, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(InputMatrix::from_points({{1.0, 2.0}, {3.0}}), std::invalid_argument);
  const InputMatrix m = InputMatrix::from_points({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  CHECK(m.rows() == 3);
  CHECK(m.dim() == 2);
  CHECK(m(2, 1) == 6.0);
  CHECK(m.column(1)[0] == 2.0);
  CHECK(m.point(1) == std::vector<double>{3.0, 4.0});
}

TEST_CASE("Legendre basis is orthogonal on [-1, 1] and bounded by 1") {
  const auto basis = legendre_basis(3);
  REQUIRE(basis->size() == 4);
  const int steps = 4000;
  for (std::size_t p = 0; p < basis->size(); ++p)
    for (std::size_t q = 0; q < basis->size(); ++q) {
      double s = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double x = -1.0 + (i + 0.5) * 2.0 / steps;
        const std::vector<double> pt = {x};
        REQUIRE(std::fabs((*basis)(p, pt)) <= 1.0);
        s += (*basis)(p, pt) * (*basis)(q, pt);
      }
      s /= steps;
      CHECK(s == doctest::Approx(p == q ? 1.0 / (2.0 * p + 1.0) : 0.0).epsilon(1e-5).scale(1.0));
    }
}

// ---------------------------------------------------------------------------
// Randomness

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("make_streams is deterministic") {
  auto a = make_streams(42, 3);
  auto b = make_streams(42, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t s = 0; s < 3; ++s)
    for (int i = 0; i < 1000; ++i) CHECK(a[s].next_u64() == b[s].next_u64());
  CHECK_THROWS_AS(make_streams(42, 0), std::invalid_argument);
}

TEST_CASE("different master seeds give different sequences") {
  auto a = make_streams(42, 1);
  auto b = make_streams(43, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a[0].uniform01() == b[0].uniform01();
  CHECK(equal == 0);
}

TEST_CASE("streams 0 and 1 are uncorrelated") {
  auto s = make_streams(42, 2);
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s[0].uniform01(), y = s[1].uniform01();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr =
      cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::fabs(corr) <= 0.05);
}

TEST_CASE("stream output does not depend on interleaving") {
  RngStream a(9, 4), b(9, 4);
  std::vector<double> first;
  for (int i = 0; i < 50; ++i) first.push_back(a.uniform01());
  RngStream other(9, 5);
  for (int i = 0; i < 50; ++i) {
    (void)other.uniform01();
    CHECK(b.uniform01() == first[i]);
  }
}

TEST_CASE("uniform, normal and below behave") {
  RngStream r(11, 0);
  double mean = 0, var = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    const double v = r.uniform(-1.0, 1.0);
    REQUIRE(v > -1.0);
    REQUIRE(v < 1.0);
    const double z = r.normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::fabs(mean) < 0.015);
  CHECK(std::fabs(var - 1.0) < 0.02);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[r.below(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK_THROWS_AS(r.below(0), std::invalid_argument);
}

TEST_CASE("derived streams differ by path") {
  RngStream root(5, 0);
  std::set<std::uint64_t> ids;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) ids.insert(root.derive({a, b}).stream_id());
  CHECK(ids.size() == 400);
  CHECK(root.derive({1, 2}).stream_id() == root.derive({1, 2}).stream_id());
  CHECK(root.derive({1, 2}).stream_id() != root.derive({2, 1}).stream_id());
}

TEST_CASE("FitError prefixes the dataset index") {
  const FitError e("boom", 3);
  CHECK(std::string(e.what()).find("dataset 3") != std::string::npos);
  REQUIRE(e.dataset().has_value());
  CHECK(*e.dataset() == 3);
  CHECK_FALSE(FitError("plain").dataset().has_value());
}
