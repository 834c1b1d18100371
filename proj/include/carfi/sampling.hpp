#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "carfi/density.hpp"

namespace carfi {

// Unconditional generation: leaf by weight, then each feature from its leaf
// density.
Dataset forge(const DensityModel& model, std::size_t n, std::uint64_t seed);

// R draws of the features in `targets` (ascending column order) given updated
// leaf weights. Result is row-major, R x targets.size().
std::vector<double> sample_conditional(const DensityModel& model, const ConditionalWeights& weights,
                                       std::span<const std::size_t> targets, std::size_t replicates,
                                       std::uint64_t seed);

// Full rows of n draws: evidence columns copied, the rest sampled.
Dataset forge_conditional(const DensityModel& model, const Evidence& evidence, std::size_t n, std::uint64_t seed);

namespace detail {

std::vector<double> cumulative(std::span<const double> weights);

// One replicate: rng stream derive_seed(seed, r), one uniform for the leaf,
// then the targets in the given order. Shared by every sampler so the serial
// and parallel importance paths draw identical values.
inline void draw_replicate(const DensityModel& model, std::span<const double> cum,
                           std::span<const std::size_t> leaf_index, std::span<const std::size_t> targets,
                           std::uint64_t seed, std::uint64_t r, std::span<double> out) {
  Rng rng(derive_seed(seed, r));
  std::size_t k = draw_from_cumulative(cum, uniform01(rng));
  if (!leaf_index.empty()) k = leaf_index[k];
  const auto& leaf = model.leaf(k);
  for (std::size_t s = 0; s < targets.size(); ++s) out[s] = leaf.features[targets[s]].sample(rng);
}

}  // namespace detail

}  // namespace carfi
