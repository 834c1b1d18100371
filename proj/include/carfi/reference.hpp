#pragma once

// Straightforward serial implementations kept as test and benchmark
// baselines for the optimized, parallel code paths.

#include "carfi/forest.hpp"
#include "carfi/importance.hpp"

namespace carfi::reference {

// Exhaustive split search: every midpoint threshold, every proper subset of
// the present levels, child impurities recomputed from scratch.
detail::SplitCandidate brute_force_split(const detail::GrowData& data, std::span<const std::uint32_t> rows,
                                         std::size_t feature);

// One tree after another with the exhaustive split search.
Forest fit_forest(const Dataset& features, std::span<const double> y, Task task, const ForestParams& params,
                  std::uint64_t seed, std::size_t num_classes = 0);

// Per instance: condition() on the evidence, sample_conditional(), predict.
ImportanceReport carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                       const ImportanceQuery& query);

}  // namespace carfi::reference
