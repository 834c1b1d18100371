#include "carfi/reference.hpp"

#include <algorithm>
#include <cmath>

#include "carfi/sampling.hpp"

namespace carfi::reference {

namespace {

double impurity(const detail::GrowData& d, const std::vector<std::uint32_t>& rows) {
  const double n = static_cast<double>(rows.size());
  if (d.task == Task::Classification) {
    std::vector<double> counts(d.num_classes, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(d.y[r])] += 1.0;
    double g = n;
    for (double c : counts) g -= c * c / n;
    return g;
  }
  double mean = 0.0;
  for (auto r : rows) mean += d.y[r];
  mean /= n;
  double sse = 0.0;
  for (auto r : rows) sse += (d.y[r] - mean) * (d.y[r] - mean);
  return sse;
}

}  // namespace

detail::SplitCandidate brute_force_split(const detail::GrowData& data, std::span<const std::uint32_t> rows,
                                         std::size_t feature) {
  const auto x = data.columns[feature];
  const std::vector<std::uint32_t> all(rows.begin(), rows.end());
  const double parent = impurity(data, all);
  detail::SplitCandidate best;

  auto consider = [&](const SplitRule& rule) {
    std::vector<std::uint32_t> left, right;
    for (auto r : rows) (rule.goes_left(x[r]) ? left : right).push_back(r);
    if (left.size() < data.min_node_size || right.size() < data.min_node_size) return;
    const double gain = parent - impurity(data, left) - impurity(data, right);
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.rule = rule;
    }
  };

  if (data.num_levels[feature] == 0) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(x[r]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double t = values[k] + (values[k + 1] - values[k]) / 2.0;
      if (!(t >= values[k] && t < values[k + 1])) t = values[k];
      consider(SplitRule{feature, t, {}});
    }
    return best;
  }

  const std::size_t levels = data.num_levels[feature];
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < levels; ++l) {
    if (std::any_of(rows.begin(), rows.end(), [&](auto r) { return static_cast<std::size_t>(x[r]) == l; })) {
      present.push_back(l);
    }
  }
  if (present.size() < 2 || present.size() > 20) return best;
  const std::size_t m = present.size();
  for (std::uint64_t bits = 1; bits + 1 < (std::uint64_t{1} << m); ++bits) {
    std::vector<std::uint8_t> mask(levels, 0);
    for (std::size_t q = 0; q < m; ++q) {
      if (bits >> q & 1) mask[present[q]] = 1;
    }
    consider(SplitRule{feature, 0.0, std::move(mask)});
  }
  return best;
}

Forest fit_forest(const Dataset& features, std::span<const double> y, Task task, const ForestParams& params,
                  std::uint64_t seed, std::size_t num_classes) {
  if (task == Task::Classification && num_classes == 0) {
    double mx = 0.0;
    for (double v : y) mx = std::max(mx, v);
    num_classes = std::max<std::size_t>(2, static_cast<std::size_t>(mx) + 1);
  }
  if (task == Task::Regression) num_classes = 0;
  const auto data = detail::make_grow_data(features, y, task, num_classes, params);
  const std::size_t mtry = detail::resolve_mtry(params, task, features.num_cols());
  std::vector<Tree> trees;
  for (std::size_t t = 0; t < static_cast<std::size_t>(params.num_trees); ++t) {
    trees.push_back(detail::grow_tree(data, params, mtry, derive_seed(seed, t), &brute_force_split));
  }
  return Forest(features.schema().with_target(std::nullopt), task, num_classes, params, std::move(trees));
}

ImportanceReport carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                       const ImportanceQuery& query) {
  const auto td = TestData::from(test);
  const Schema& schema = td.features.schema();
  carfi::detail::check_compatible(schema, learner, &model);
  const auto c = resolve_conditioning(query, schema.size());
  auto s = query.features;
  std::sort(s.begin(), s.end());
  const std::size_t n = td.features.num_rows();

  ImportanceReport rep;
  rep.method = Method::CArfi;
  rep.features = s;
  rep.conditioning = c;
  rep.replicates = query.replicates;
  rep.loss = query.loss;
  rep.seed = query.seed;

  std::vector<double> base_sq(n), delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = td.features.row(i);
    const double e0 = learner.predict_row(row) - td.y[i];
    base_sq[i] = e0 * e0;

    const auto weights = condition(model, Evidence::from_row(schema, row, c));
    if (weights.extrapolated) ++rep.extrapolated;
    const std::uint64_t seed = derive_seed(query.seed, carfi::detail::instance_key(row, td.y[i]));
    const auto draws = sample_conditional(model, weights, s, query.replicates, seed);

    double sum = 0.0;
    for (std::size_t r = 0; r < query.replicates; ++r) {
      auto work = row;
      for (std::size_t k = 0; k < s.size(); ++k) work[s[k]] = draws[r * s.size() + k];
      const double e = learner.predict_row(work) - td.y[i];
      sum += e * e - base_sq[i];
    }
    delta[i] = sum / static_cast<double>(query.replicates);
  }
  carfi::detail::finish_report(rep, base_sq, delta);
  return rep;
}

}  // namespace carfi::reference
