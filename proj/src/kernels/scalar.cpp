#include <cmath>

#include "dfcr/kernels.hpp"

namespace dfcr::kernels {
namespace {

void squared_distances_scalar(const double* cols, std::size_t n, std::size_t d, const double* q,
                              double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double* col = cols + k * n;
    const double qk = q[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = col[i] - qk;
      out[i] = out[i] + diff * diff;
    }
  }
}

void affine_scalar(const double* cols, std::size_t n, std::size_t d, const double* w, double bias,
                   double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = bias;
  for (std::size_t k = 0; k < d; ++k) {
    const double* col = cols + k * n;
    const double wk = w[k];
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + wk * col[i];
  }
}

void threshold_signs_scalar(const double* f, const double* u, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (f[i] + u[i] >= 0.0) ? 1.0 : -1.0;
}

double mean_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i] * c[i];
  return sum;
}

// tanh(z/2) written through e = exp(-|z|) so that no intermediate overflows.
void logistic_pm1_scalar(const double* z, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(-std::fabs(z[i]));
    const double mag = (1.0 - e) / (1.0 + e);
    out[i] = z[i] >= 0.0 ? mag : -mag;
  }
}

double lsq_terms_scalar(const double* z, const double* y, std::size_t n, double* resid,
                        double* slope) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(-std::fabs(z[i]));
    const double inv = 1.0 / (1.0 + e);
    const double mag = (1.0 - e) * inv;
    const double f = z[i] >= 0.0 ? mag : -mag;
    const double r = f - y[i];
    resid[i] = r;
    slope[i] = 2.0 * e * inv * inv;
    sum += r * r;
  }
  return sum;
}

double bernoulli_terms_scalar(const double* z, const double* t, std::size_t n, double* score,
                              double* weight) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(-std::fabs(z[i]));
    const double inv = 1.0 / (1.0 + e);
    const double p = z[i] >= 0.0 ? inv : e * inv;
    // log p = -log(1 + exp(-z)); log(1 - p) = log p - z.
    const double log_p = (z[i] >= 0.0 ? 0.0 : z[i]) - std::log1p(e);
    score[i] = t[i] - p;
    weight[i] = e * inv * inv;
    sum += log_p - (1.0 - t[i]) * z[i];
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::scalar,
      squared_distances_scalar,
      affine_scalar,
      threshold_signs_scalar,
      mean_squared_diff_scalar,
      dot_scalar,
      dot3_scalar,
      logistic_pm1_scalar,
      lsq_terms_scalar,
      bernoulli_terms_scalar,
  };
  return table;
}

}  // namespace dfcr::kernels
