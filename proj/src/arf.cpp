#include "carfi/arf.hpp"

#include "carfi/common.hpp"

namespace carfi {

void ArfConfig::validate() const {
  if (min_node_size < 1) throw InputError("ARF min_node_size must be >= 1");
  if (num_trees < 1) throw InputError("ARF num_trees must be >= 1");
  if (max_iterations < 1) throw InputError("ARF max_iterations must be >= 1");
  if (!(delta >= 0.0 && delta <= 0.5)) throw InputError("ARF delta must lie in [0, 0.5]");
}

namespace detail {

Dataset generate_from_leaves(const Forest& forest, const Dataset& real, std::size_t n, std::uint64_t seed) {
  const std::size_t n_real = real.num_rows();
  const std::size_t p = real.num_cols();
  const auto leaf_of = forest.apply(real);

  // Real row ids per forest-wide leaf.
  std::vector<std::vector<std::uint32_t>> members(forest.num_leaves());
  for (const auto& tree_leaves : leaf_of) {
    for (std::size_t i = 0; i < n_real; ++i) {
      members[static_cast<std::size_t>(tree_leaves[i])].push_back(static_cast<std::uint32_t>(i));
    }
  }

  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  const std::size_t trees = forest.num_trees();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t t = uniform_index(rng, trees);
    // A uniform real row lands in leaf l with probability coverage(l).
    const std::size_t anchor = uniform_index(rng, n_real);
    const auto& rows = members[static_cast<std::size_t>(leaf_of[t][anchor])];
    for (std::size_t j = 0; j < p; ++j) cols[j][i] = real.at(rows[uniform_index(rng, rows.size())], j);
  }
  return Dataset(real.schema(), std::move(cols));
}

}  // namespace detail

ArfModel fit_arf(const Dataset& features, const ArfConfig& config) {
  config.validate();
  if (features.schema().target()) {
    throw InputError("the ARF is fit on features only; drop target '" + *features.schema().target() + "' first");
  }
  const std::size_t n = features.num_rows();
  if (n < 2) throw InputError("ARF needs at least two rows");

  auto real = std::make_shared<const Dataset>(features);

  ForestParams params;
  params.num_trees = config.num_trees;
  params.min_node_size = config.min_node_size;
  params.mtry = config.mtry;
  params.bootstrap = true;

  // Real rows first (label 1), synthetic rows after (label 0).
  std::vector<double> labels(2 * n, 0.0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n), 1.0);

  Dataset synthetic = features;
  for (std::size_t j = 0; j < features.num_cols(); ++j) {
    synthetic = permute_column(synthetic, j, derive_seed(config.seed, 0, j));
  }

  auto discriminate = [&](const Dataset& synth, std::uint64_t round) {
    const Dataset both = real->append_rows(synth);
    Forest f = fit_forest(both, labels, Task::Classification, params, derive_seed(config.seed, 1, round), 2);
    const double acc = oob_accuracy(f, both, labels);
    return std::pair{std::move(f), acc};
  };

  auto [forest, acc] = discriminate(synthetic, 0);
  std::vector<double> trace{acc};
  for (int k = 1; acc > 0.5 + config.delta && k <= config.max_iterations; ++k) {
    synthetic = detail::generate_from_leaves(forest, *real, n, derive_seed(config.seed, 2, static_cast<std::uint64_t>(k)));
    auto [next, next_acc] = discriminate(synthetic, static_cast<std::uint64_t>(k));
    forest = std::move(next);
    acc = next_acc;
    trace.push_back(acc);
  }
  return ArfModel(std::move(forest), std::move(trace), std::move(real), config);
}

}  // namespace carfi
