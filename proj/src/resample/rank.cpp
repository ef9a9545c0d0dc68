#include <cmath>
#include <string>

#include "dfcr/candidate_test.hpp"
#include "dfcr/resample.hpp"

namespace dfcr {

ReferenceVector::ReferenceVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("reference vector: length must be >= 2");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("reference vector: entries must be finite and >= 0");
  }
}

int rank_at(std::span<const double> z, std::span<const int> permutation, std::size_t position) {
  const std::size_t m = z.size();
  if (permutation.size() != m)
    throw std::invalid_argument("rank: permutation length " + std::to_string(permutation.size()) +
                                " does not match m = " + std::to_string(m));
  if (position >= m) throw std::out_of_range("rank: position outside 0..m-1");
  auto tag = [&](std::size_t j) { return j == 0 ? permutation[m - 1] : permutation[j - 1]; };
  const double pivot = z[position];
  const int pivot_tag = tag(position);
  int rank = 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == position) continue;
    if (pivot > z[j] || (pivot == z[j] && pivot_tag > tag(j))) ++rank;
  }
  return rank;
}

int rank_statistic(const ReferenceVector& z, std::span<const int> permutation) {
  return rank_at(z.values(), permutation, 0);
}

RankResult test_candidate(const RegressionModel& candidate, const StemRandomness& stem,
                          const PreparedEngine& engine) {
  const LabeledSample& sample = engine.sample();
  if (sample.size() != stem.n())
    throw std::invalid_argument("test_candidate: stem has " + std::to_string(stem.n()) +
                                " rows but the sample has " + std::to_string(sample.size()));
  const std::vector<double> values = candidate.evaluate_rows(sample.inputs());
  const AlternativeOutputs alternatives = generate_alternatives(candidate, values, stem);
  ReferenceVector z = engine.reference_vector(values, alternatives);
  const int rank = rank_statistic(z, stem.permutation());
  const bool accepted = stem.q1() <= rank && rank <= stem.q2();
  return RankResult{rank, accepted, std::move(z)};
}

RankResult test_candidate(const RegressionModel& candidate, const LabeledSample& sample,
                          const StemRandomness& stem, const RankingEngine& engine) {
  return test_candidate(candidate, stem, PreparedEngine(engine, sample));
}

}  // namespace dfcr
