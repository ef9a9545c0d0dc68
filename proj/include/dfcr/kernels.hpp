#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and
// an AVX2 version; the active table is chosen once at runtime from CPU
// features and can be pinned with select_isa() or DFCR_ISA=scalar|avx2.
//
// Elementwise kernels without transcendental functions (distances, affine
// maps, sign thresholds) give bit-identical results on every ISA. Reductions
// and the exp-based kernels agree with the scalar reference to a few ulps.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dfcr::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);
bool isa_supported(Isa isa);

/// Raw-pointer kernel table. `cols` is a column-major n x d block.
struct KernelTable {
  Isa isa;
  // out[i] = sum_k (cols[k*n + i] - q[k])^2
  void (*squared_distances)(const double* cols, std::size_t n, std::size_t d, const double* q,
                            double* out);
  // out[i] = bias + sum_k w[k] * cols[k*n + i]
  void (*affine)(const double* cols, std::size_t n, std::size_t d, const double* w, double bias,
                 double* out);
  // out[i] = (f[i] + u[i] >= 0) ? +1 : -1
  void (*threshold_signs)(const double* f, const double* u, std::size_t n, double* out);
  // (1/n) sum (a[i] - b[i])^2
  double (*mean_squared_diff)(const double* a, const double* b, std::size_t n);
  // sum a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum a[i] * b[i] * c[i]
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  // out[i] = 2 / (1 + exp(-z[i])) - 1
  void (*logistic_pm1)(const double* z, std::size_t n, double* out);
  // Squared-loss terms of f = logistic_pm1(z) against y:
  // resid[i] = f - y, slope[i] = df/dz = (1 - f^2) / 2; returns sum resid^2.
  double (*lsq_terms)(const double* z, const double* y, std::size_t n, double* resid,
                      double* slope);
  // Bernoulli log-likelihood terms with p = 1 / (1 + exp(-z)) and t in {0,1}:
  // score[i] = t - p, weight[i] = p (1 - p); returns sum t log p + (1-t) log(1-p).
  double (*bernoulli_terms)(const double* z, const double* t, std::size_t n, double* score,
                            double* weight);
};

const KernelTable& scalar_table();
/// Null when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// The table used by the library.
const KernelTable& active();
Isa active_isa();
/// Pins the ISA; throws std::invalid_argument if the CPU does not support it.
void select_isa(Isa isa);

// Span conveniences over the active table.
void squared_distances(std::span<const double> cols, std::size_t d, std::span<const double> q,
                       std::span<double> out);
void affine(std::span<const double> cols, std::size_t d, std::span<const double> w, double bias,
            std::span<double> out);
void threshold_signs(std::span<const double> f, std::span<const double> u, std::span<double> out);
double mean_squared_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
void logistic_pm1(std::span<const double> z, std::span<double> out);

}  // namespace dfcr::kernels
