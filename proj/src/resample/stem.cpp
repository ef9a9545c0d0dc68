#include <cmath>
#include <string>

#include "dfcr/kernels.hpp"
#include "dfcr/resample.hpp"

namespace dfcr {

StemRandomness::StemRandomness(std::size_t n, int m, int q1, int q2,
                               std::vector<double> perturbations, std::vector<int> permutation,
                               std::uint64_t seed, std::uint64_t stream_id)
    : n_(n),
      m_(m),
      q1_(q1),
      q2_(q2),
      perturbations_(std::move(perturbations)),
      permutation_(std::move(permutation)),
      seed_(seed),
      stream_id_(stream_id) {
  if (n_ == 0) throw std::invalid_argument("stem: n must be >= 1");
  if (m_ < 2) throw std::invalid_argument("stem: m must be >= 2, given " + std::to_string(m_));
  if (!(1 <= q1_ && q1_ <= q2_ && q2_ <= m_))
    throw std::invalid_argument("stem: need 1 <= q1 <= q2 <= m, given q1=" + std::to_string(q1_) +
                                " q2=" + std::to_string(q2_) + " m=" + std::to_string(m_));
  if (perturbations_.size() != n_ * static_cast<std::size_t>(m_ - 1))
    throw std::invalid_argument("stem: perturbation matrix must be n x (m-1)");
  for (double u : perturbations_) {
    if (!(u > -1.0 && u < 1.0))
      throw std::invalid_argument("stem: perturbations must lie strictly inside (-1, 1)");
  }
  if (permutation_.size() != static_cast<std::size_t>(m_))
    throw std::invalid_argument("stem: permutation must have length m");
  std::vector<bool> seen(m_ + 1, false);
  for (int v : permutation_) {
    if (v < 1 || v > m_ || seen[v])
      throw std::invalid_argument("stem: permutation is not a bijection on {1..m}");
    seen[v] = true;
  }
}

double StemRandomness::confidence() const {
  return static_cast<double>(q2_ - q1_ + 1) / static_cast<double>(m_);
}

std::span<const double> StemRandomness::perturbations(std::size_t j) const {
  if (j < 1 || j >= static_cast<std::size_t>(m_))
    throw std::out_of_range("stem: alternative index must be in 1..m-1");
  return std::span<const double>(perturbations_).subspan((j - 1) * n_, n_);
}

int StemRandomness::tag(std::size_t j) const {
  return j == 0 ? permutation_[m_ - 1] : permutation_[j - 1];
}

StemRandomness init_stem_window(std::size_t n, int m, int q1, int q2, RngStream stream) {
  if (n == 0) throw std::invalid_argument("init_stem: n must be >= 1");
  if (m < 2) throw std::invalid_argument("init_stem: m must be >= 2");
  std::vector<double> u(n * static_cast<std::size_t>(m - 1));
  for (double& v : u) v = stream.uniform(-1.0, 1.0);
  std::vector<int> pi(m);
  for (int k = 0; k < m; ++k) pi[k] = k + 1;
  for (int k = m - 1; k > 0; --k) {
    const auto j = static_cast<int>(stream.below(static_cast<std::uint64_t>(k) + 1));
    std::swap(pi[k], pi[j]);
  }
  return StemRandomness(n, m, q1, q2, std::move(u), std::move(pi), stream.seed(),
                        stream.stream_id());
}

StemRandomness init_stem(std::size_t n, int m, double gamma, RngStream stream) {
  if (m < 2) throw std::invalid_argument("init_stem: m must be >= 2");
  const double scaled = gamma * m;
  const double q = std::round(scaled);
  if (!(std::fabs(scaled - q) <= 1e-9 * m) || q < 1 || q > m - 1)
    throw std::invalid_argument("init_stem: gamma * m = " + std::to_string(scaled) +
                                " is not an integer in {1..m-1}; choose m so that gamma * m is "
                                "an integer (e.g. gamma = 19/20 with m = 20 or 40)");
  return init_stem_window(n, m, 1, static_cast<int>(q), stream);
}

AlternativeOutputs::AlternativeOutputs(RegressionModel candidate, std::size_t n, int m,
                                       std::vector<double> labels)
    : candidate_(std::move(candidate)), n_(n), m_(m), labels_(std::move(labels)) {
  if (labels_.size() != n_ * static_cast<std::size_t>(m_ - 1))
    throw std::invalid_argument("alternative outputs: label matrix must be n x (m-1)");
}

std::span<const double> AlternativeOutputs::labels(std::size_t j) const {
  if (j < 1 || j >= static_cast<std::size_t>(m_))
    throw std::out_of_range("alternative outputs: index must be in 1..m-1");
  return std::span<const double>(labels_).subspan((j - 1) * n_, n_);
}

AlternativeOutputs generate_alternatives(const RegressionModel& candidate,
                                         std::span<const double> candidate_values,
                                         const StemRandomness& stem) {
  const std::size_t n = stem.n();
  if (candidate_values.size() != n)
    throw std::invalid_argument("generate_alternatives: stem has " + std::to_string(n) +
                                " rows but the sample has " +
                                std::to_string(candidate_values.size()));
  std::vector<double> labels(n * static_cast<std::size_t>(stem.m() - 1));
  for (int j = 1; j < stem.m(); ++j) {
    kernels::threshold_signs(candidate_values, stem.perturbations(j),
                             std::span<double>(labels).subspan((j - 1) * n, n));
  }
  return AlternativeOutputs(candidate, n, stem.m(), std::move(labels));
}

AlternativeOutputs generate_alternatives(const RegressionModel& candidate,
                                         const LabeledSample& sample,
                                         const StemRandomness& stem) {
  if (sample.size() != stem.n())
    throw std::invalid_argument("generate_alternatives: stem has " + std::to_string(stem.n()) +
                                " rows but the sample has " + std::to_string(sample.size()));
  const std::vector<double> values = candidate.evaluate_rows(sample.inputs());
  return generate_alternatives(candidate, values, stem);
}

}  // namespace dfcr
