#pragma once

// Membership test of one candidate in the resampling confidence region.

#include "dfcr/estimators.hpp"
#include "dfcr/resample.hpp"

namespace dfcr {

/// Generates the alternative datasets for `candidate`, computes the reference
/// vector with the engine and ranks the original dataset. The same stem must
/// be used for every candidate of one region.
RankResult test_candidate(const RegressionModel& candidate, const LabeledSample& sample,
                          const StemRandomness& stem, const RankingEngine& engine);

/// Sweep form: the engine has already fitted the original sample once.
RankResult test_candidate(const RegressionModel& candidate, const StemRandomness& stem,
                          const PreparedEngine& engine);

}  // namespace dfcr
