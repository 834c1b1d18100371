#include "carfi/sampling.hpp"

#include <algorithm>

namespace carfi {

namespace detail {

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cum(weights.size());
  double s = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    s += weights[l];
    cum[l] = s;
  }
  return cum;
}

}  // namespace detail

Dataset forge(const DensityModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("forge needs n >= 1");
  const std::size_t p = model.schema().size();
  std::vector<std::size_t> all(p);
  for (std::size_t j = 0; j < p; ++j) all[j] = j;
  const auto cum = detail::cumulative(model.weights());
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
#pragma omp parallel
  {
    std::vector<double> buf(p);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      detail::draw_replicate(model, cum, {}, all, seed, i, buf);
      for (std::size_t j = 0; j < p; ++j) cols[j][i] = buf[j];
    }
  }
  return Dataset(model.schema(), std::move(cols));
}

std::vector<double> sample_conditional(const DensityModel& model, const ConditionalWeights& weights,
                                       std::span<const std::size_t> targets, std::size_t replicates,
                                       std::uint64_t seed) {
  if (replicates < 1) throw InputError("need at least one replicate");
  if (weights.weights.size() != model.num_leaves()) throw InputError("weights do not match the model");
  for (std::size_t s = 0; s < targets.size(); ++s) {
    if (targets[s] >= model.schema().size()) throw InputError("sampled column out of range");
    if (weights.evidence.contains(targets[s])) throw InputError("sampled columns overlap the evidence");
    if (s > 0 && targets[s] <= targets[s - 1]) throw InputError("sampled columns must be strictly ascending");
  }
  const auto cum = detail::cumulative(weights.weights);
  const std::size_t m = targets.size();
  std::vector<double> out(replicates * m);
  for (std::size_t r = 0; r < replicates; ++r) {
    detail::draw_replicate(model, cum, {}, targets, seed, r, std::span<double>(out).subspan(r * m, m));
  }
  return out;
}

Dataset forge_conditional(const DensityModel& model, const Evidence& evidence, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("need n >= 1");
  const std::size_t p = model.schema().size();
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < p; ++j) {
    if (!evidence.contains(j)) free.push_back(j);
  }
  const auto w = condition(model, evidence);
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (const auto& [j, x] : evidence.assignments()) std::fill(cols[j].begin(), cols[j].end(), x);
  if (!free.empty()) {
    const auto draws = sample_conditional(model, w, free, n, seed);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = 0; s < free.size(); ++s) cols[free[s]][i] = draws[i * free.size() + s];
    }
  }
  return Dataset(model.schema(), std::move(cols));
}

}  // namespace carfi
