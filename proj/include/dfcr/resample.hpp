#pragma once

// Stem randomness, alternative label generation, reference vectors and the
// pi-tie-broken rank statistic.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dfcr/core.hpp"
#include "dfcr/rng.hpp"

namespace dfcr {

/// The randomness drawn once per region construction: the n x (m-1) matrix
/// of Uniform(-1, 1) perturbations, a uniform permutation of {1..m}, and the
/// acceptance window [q1, q2] for the rank.
class StemRandomness {
 public:
  /// `perturbations` holds column j-1 (alternative j, length n) at offset
  /// (j-1)*n; `permutation[k-1]` is pi(k).
  StemRandomness(std::size_t n, int m, int q1, int q2, std::vector<double> perturbations,
                 std::vector<int> permutation, std::uint64_t seed = 0,
                 std::uint64_t stream_id = 0);

  std::size_t n() const { return n_; }
  int m() const { return m_; }
  int q1() const { return q1_; }
  int q2() const { return q2_; }
  /// (q2 - q1 + 1) / m
  double confidence() const;
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// U_{., j} for alternative j in 1..m-1.
  std::span<const double> perturbations(std::size_t j) const;
  /// pi(1..m), zero-based storage.
  std::span<const int> permutation() const { return permutation_; }
  /// Tie-break tag of dataset j: pi(m) for the original (j = 0), pi(j) otherwise.
  int tag(std::size_t j) const;

 private:
  std::size_t n_;
  int m_, q1_, q2_;
  std::vector<double> perturbations_;
  std::vector<int> permutation_;
  std::uint64_t seed_, stream_id_;
};

/// Stem for confidence level gamma with the one-sided window q1 = 1,
/// q2 = gamma * m. Requires gamma * m to be an integer in {1..m-1}.
StemRandomness init_stem(std::size_t n, int m, double gamma, RngStream stream);
/// Stem with an explicit window 1 <= q1 <= q2 <= m.
StemRandomness init_stem_window(std::size_t n, int m, int q1, int q2, RngStream stream);

/// Labels of the m-1 alternative datasets for one candidate; the inputs are
/// shared with the original sample and never copied.
class AlternativeOutputs {
 public:
  AlternativeOutputs(RegressionModel candidate, std::size_t n, int m, std::vector<double> labels);

  const RegressionModel& candidate() const { return candidate_; }
  std::size_t n() const { return n_; }
  int m() const { return m_; }
  /// Y_{., j}(theta) for j in 1..m-1.
  std::span<const double> labels(std::size_t j) const;

 private:
  RegressionModel candidate_;
  std::size_t n_;
  int m_;
  std::vector<double> labels_;
};

/// Y_{i,j} = sign(f(X_i) + U_{i,j}) with sign(0) = +1.
AlternativeOutputs generate_alternatives(const RegressionModel& candidate,
                                         const LabeledSample& sample,
                                         const StemRandomness& stem);
/// Same, from candidate values already evaluated at the sample inputs.
AlternativeOutputs generate_alternatives(const RegressionModel& candidate,
                                         std::span<const double> candidate_values,
                                         const StemRandomness& stem);

/// Z[0] for the original dataset, Z[1..m-1] for the alternatives.
class ReferenceVector {
 public:
  explicit ReferenceVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Rank of position `position` among the entries of z under the order
/// z_j < z_k, ties broken by tag (position 0 carries pi(m), position j carries pi(j)).
int rank_at(std::span<const double> z, std::span<const int> permutation, std::size_t position);
/// 1 + #{j >= 1 : Z[0] >_pi Z[j]}.
int rank_statistic(const ReferenceVector& z, std::span<const int> permutation);

struct RankResult {
  int rank;
  bool accepted;
  ReferenceVector z;
};

}  // namespace dfcr
