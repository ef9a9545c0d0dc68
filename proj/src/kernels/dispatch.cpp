#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dfcr/kernels.hpp"

namespace dfcr::kernels {

extern const KernelTable kAvx2Table;

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("DFCR_ISA")) {
    const auto isa = parse_isa(env);
    if (!isa) throw std::invalid_argument(std::string("DFCR_ISA: unknown ISA '") + env + "'");
    if (*isa == Isa::scalar) return &scalar_table();
    if (!cpu_has_avx2()) throw std::invalid_argument("DFCR_ISA=avx2 but the CPU lacks AVX2/FMA");
    return &kAvx2Table;
  }
  return cpu_has_avx2() ? &kAvx2Table : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

const KernelTable* avx2_table() { return cpu_has_avx2() ? &kAvx2Table : nullptr; }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void select_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("ISA " + std::string(to_string(isa)) + " is not supported here");
  current().store(isa == Isa::avx2 ? &kAvx2Table : &scalar_table(), std::memory_order_release);
}

void squared_distances(std::span<const double> cols, std::size_t d, std::span<const double> q,
                       std::span<double> out) {
  active().squared_distances(cols.data(), out.size(), d, q.data(), out.data());
}

void affine(std::span<const double> cols, std::size_t d, std::span<const double> w, double bias,
            std::span<double> out) {
  active().affine(cols.data(), out.size(), d, w.data(), bias, out.data());
}

void threshold_signs(std::span<const double> f, std::span<const double> u, std::span<double> out) {
  active().threshold_signs(f.data(), u.data(), out.size(), out.data());
}

double mean_squared_diff(std::span<const double> a, std::span<const double> b) {
  return active().mean_squared_diff(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  return active().dot3(a.data(), b.data(), c.data(), a.size());
}

void logistic_pm1(std::span<const double> z, std::span<double> out) {
  active().logistic_pm1(z.data(), out.size(), out.data());
}

}  // namespace dfcr::kernels
