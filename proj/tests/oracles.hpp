#pragma once

// Reference computations written independently of the library, used to
// check it. Nothing here calls into dfcr except for plain data access.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

// Composite Simpson rule with `intervals` (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int intervals = 20000) {
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Chi-square CDF by integrating the density in t with x = t^2, which removes
// the singularity at 0 for odd dof: density(t^2) 2t = 2 norm t^{dof-1} e^{-t^2/2}.
inline double chi2_cdf(double x, int dof) {
  if (x <= 0.0) return 0.0;
  const double k = 0.5 * dof;
  const double norm = std::exp(-std::lgamma(k) - k * std::log(2.0));
  return simpson(
      [&](double t) { return 2.0 * norm * std::pow(t, dof - 1) * std::exp(-0.5 * t * t); }, 0.0,
      std::sqrt(x));
}

inline double chi2_quantile(double p, int dof) {
  double lo = 0.0, hi = 200.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double logistic_pm1(double z) { return 2.0 / (1.0 + std::exp(-z)) - 1.0; }

// (1/n) sum (sigma(b x + a) - y)^2, straight from the definition.
inline double perceptron_loss(std::span<const double> x, std::span<const double> y, double a,
                              double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = logistic_pm1(b * x[i] + a) - y[i];
    s += r * r;
  }
  return s / static_cast<double>(x.size());
}

// sum t log p + (1 - t) log(1 - p), p = 1 / (1 + e^{-(b x + a)}), t = (y + 1) / 2.
inline double log_likelihood(std::span<const double> x, std::span<const double> y, double a,
                             double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = b * x[i] + a;
    // log p = -log(1 + e^{-z}), log(1 - p) = -log(1 + e^{z})
    const double log_p = -std::log1p(std::exp(-z));
    const double log_q = -std::log1p(std::exp(z));
    s += y[i] > 0 ? log_p : log_q;
  }
  return s;
}

struct GridBest {
  double value, a, b;
};

// Exhaustive search over res x res points of [a_lo, a_hi] x [b_lo, b_hi].
template <class F>
GridBest grid_minimum(F&& f, double a_lo, double a_hi, double b_lo, double b_hi, int res) {
  GridBest best{std::numeric_limits<double>::infinity(), 0, 0};
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const double a = a_lo + i * (a_hi - a_lo) / (res - 1);
      const double b = b_lo + j * (b_hi - b_lo) / (res - 1);
      const double v = f(a, b);
      if (v < best.value) best = {v, a, b};
    }
  return best;
}

// Central differences of a scalar function of a parameter vector.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double up = f(x);
    x[k] = orig - h;
    const double down = f(x);
    x[k] = orig;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// Relative error with an absolute floor for values near zero.
inline double rel_err(double got, double want, double floor = 1e-8) {
  return std::fabs(got - want) / std::max(std::fabs(want), floor);
}

// Ranks by brute-force sorting of (value, tag) pairs; returns 1-based rank of
// position `pos` with tags per the pi convention (pos 0 carries pi(m)).
inline int sorted_rank(std::span<const double> z, std::span<const int> pi, std::size_t pos) {
  const std::size_t m = z.size();
  auto tag = [&](std::size_t j) { return j == 0 ? pi[m - 1] : pi[j - 1]; };
  int below = 0;
  for (std::size_t j = 0; j < m; ++j)
    if (z[j] < z[pos] || (z[j] == z[pos] && tag(j) < tag(pos))) ++below;
  return below + 1;
}

}  // namespace oracle
