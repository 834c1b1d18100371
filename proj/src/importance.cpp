#include "carfi/importance.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "carfi/sampling.hpp"
#include "carfi/tabular.hpp"

namespace carfi {

TestData TestData::from(const Dataset& test) {
  auto [x, y] = test.split_target();
  return TestData{std::move(x), std::move(y)};
}

std::vector<std::size_t> resolve_conditioning(const ImportanceQuery& query, std::size_t p) {
  if (query.features.empty()) throw InputError("the feature set of interest is empty");
  if (query.replicates < 1) throw InputError("need at least one replicate");
  std::vector<std::uint8_t> in_s(p, 0);
  for (auto j : query.features) {
    if (j >= p) throw InputError("feature index out of range");
    if (in_s[j]) throw InputError("duplicate feature in the set of interest");
    in_s[j] = 1;
  }
  std::vector<std::size_t> c;
  if (!query.conditioning) {
    for (std::size_t j = 0; j < p; ++j) {
      if (!in_s[j]) c.push_back(j);
    }
    return c;
  }
  c = *query.conditioning;
  std::sort(c.begin(), c.end());
  if (std::adjacent_find(c.begin(), c.end()) != c.end()) throw InputError("duplicate conditioning feature");
  for (auto j : c) {
    if (j >= p) throw InputError("conditioning index out of range");
    if (in_s[j]) throw InputError("conditioning set overlaps the features of interest");
  }
  return c;
}

std::string describe_columns(const Schema& features, std::span<const std::size_t> cols) {
  if (cols.empty()) return "none";
  std::string s;
  for (auto j : cols) s += (s.empty() ? "" : "+") + features.column(j).name;
  return s;
}

namespace detail {

std::uint64_t instance_key(std::span<const double> row, double y) {
  return derive_seed(hash_values(row), hash_values(std::span<const double>(&y, 1)));
}

void check_compatible(const Schema& test_features, const Learner& learner, const DensityModel* model) {
  if (!test_features.same_columns(learner.features())) {
    throw InputError("test features do not match the learner's features");
  }
  if (model && !test_features.same_columns(model->schema())) {
    throw InputError("test features do not match the density model's features");
  }
}

void finish_report(ImportanceReport& report, std::span<const double> base_sq, std::span<const double> deltas) {
  const std::size_t n = base_sq.size();
  report.deltas.assign(deltas.begin(), deltas.end());
  std::vector<double> replaced_mean(n);
  for (std::size_t i = 0; i < n; ++i) replaced_mean[i] = base_sq[i] + deltas[i];
  report.test = paired_t_one_sided(report.deltas);
  report.estimate = report.test.mean;
  report.base_loss = aggregate_loss(base_sq, report.loss);
  report.replaced_loss = aggregate_loss(replaced_mean, report.loss);
}

}  // namespace detail

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Leaf weights for one (instance, query), restricted to leaves with nonzero
// evidence likelihood. `leaves` empty means dense (every model leaf).
struct SparseWeights {
  std::vector<std::size_t> leaves;
  std::vector<double> cum;
  bool extrapolated = false;
};

struct ConditioningSet {
  std::vector<std::size_t> c;
  std::uint64_t mask = 0;
};

constexpr std::size_t kBlock = 128;

// Leaf weights of one instance under evidence on `set`; sparse over leaves
// that support every evidence value.
void condition_instance(const DensityModel& model, const Schema& schema, std::span<const double> row,
                        const ConditioningSet& set, std::span<const std::uint64_t> out_mask,
                        std::vector<double>& log_w, SparseWeights& sw) {
  const std::size_t num_leaves = model.num_leaves();
  log_w.clear();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < num_leaves; ++l) {
    if (!out_mask.empty() && (out_mask[l] & set.mask)) continue;
    double ll = 0.0;
    for (auto j : set.c) ll += model.leaf(l).features[j].log_pdf(row[j]);
    const double v = model.log_weights()[l] + ll;
    sw.leaves.push_back(l);
    log_w.push_back(v);
    mx = std::max(mx, v);
  }
  if (mx == -std::numeric_limits<double>::infinity()) {
    std::vector<std::pair<std::size_t, double>> ev;
    for (auto j : set.c) ev.emplace_back(j, row[j]);
    const auto w = detail::fallback_weights(model, model.weights(), Evidence(schema, std::move(ev)));
    sw.leaves.clear();
    double s = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l) {
      if (w[l] > 0.0) {
        s += w[l];
        sw.leaves.push_back(l);
        sw.cum.push_back(s);
      }
    }
    sw.extrapolated = true;
    return;
  }
  // Same operation order as normalize_log_weights followed by cumulative().
  double total = 0.0;
  for (auto& v : log_w) {
    v = std::exp(v - mx);
    total += v;
  }
  sw.cum.resize(log_w.size());
  double s = 0.0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    s += log_w[k] / total;
    sw.cum[k] = s;
  }
}

}  // namespace

std::vector<ImportanceReport> carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                                    std::span<const ImportanceQuery> queries) {
  const auto td = TestData::from(test);
  const Dataset& x = td.features;
  detail::check_compatible(x.schema(), learner, &model);
  const std::size_t n = x.num_rows(), p = x.num_cols(), nq = queries.size();
  if (n < 2) throw InputError("importance needs at least two test instances");
  const bool use_masks = p <= 64;

  // Queries sharing a conditioning set share its per-instance weights.
  std::vector<std::vector<std::size_t>> s_of(nq);
  std::vector<std::size_t> set_of(nq);
  std::vector<ConditioningSet> sets;
  for (std::size_t q = 0; q < nq; ++q) {
    auto c = resolve_conditioning(queries[q], p);
    s_of[q] = queries[q].features;
    std::sort(s_of[q].begin(), s_of[q].end());
    auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& cs) { return cs.c == c; });
    if (it == sets.end()) {
      ConditioningSet cs;
      for (auto j : c) {
        if (use_masks) cs.mask |= std::uint64_t{1} << j;
      }
      cs.c = std::move(c);
      sets.push_back(std::move(cs));
      it = sets.end() - 1;
    }
    set_of[q] = static_cast<std::size_t>(it - sets.begin());
  }
  const std::size_t ns = sets.size();

  const auto rows = x.row_major();
  std::vector<double> base_sq(n);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> row(rows.data() + i * p, p);
    const double e = learner.predict_row(row) - td.y[i];
    base_sq[i] = e * e;
    keys[i] = detail::instance_key(row, td.y[i]);
  }

  const std::size_t num_leaves = model.num_leaves();
  const auto prior_cum = detail::cumulative(model.weights());
  std::vector<std::vector<double>> delta(nq, std::vector<double>(n));
  std::vector<std::vector<std::uint8_t>> extrapolated(ns, std::vector<std::uint8_t>(n, 0));
  std::vector<double> set_seconds(ns, 0.0), query_seconds(nq, 0.0);

  std::vector<SparseWeights> block_weights(kBlock * ns);
  for (std::size_t b0 = 0; b0 < n; b0 += kBlock) {
    const std::size_t b1 = std::min(n, b0 + kBlock);

#pragma omp parallel
    {
      std::vector<std::uint64_t> out_mask(use_masks ? num_leaves : 0);
      std::vector<double> log_w;
      std::vector<double> local_seconds(ns, 0.0);
#pragma omp for schedule(dynamic, 4)
      for (std::size_t i = b0; i < b1; ++i) {
        const std::span<const double> row(rows.data() + i * p, p);
        auto t0 = Clock::now();
        if (use_masks) {
          for (std::size_t l = 0; l < num_leaves; ++l) {
            const auto& f = model.leaf(l).features;
            std::uint64_t m = 0;
            for (std::size_t j = 0; j < p; ++j) {
              if (!f[j].supports(row[j])) m |= std::uint64_t{1} << j;
            }
            out_mask[l] = m;
          }
        }
        const double mask_seconds = seconds_since(t0) / static_cast<double>(ns);
        for (std::size_t k = 0; k < ns; ++k) {
          t0 = Clock::now();
          auto& sw = block_weights[(i - b0) * ns + k];
          sw = SparseWeights{};
          if (!sets[k].c.empty()) {
            condition_instance(model, x.schema(), row, sets[k], out_mask, log_w, sw);
            extrapolated[k][i] = sw.extrapolated;
          }
          local_seconds[k] += mask_seconds + seconds_since(t0);
        }
      }
#pragma omp critical
      for (std::size_t k = 0; k < ns; ++k) set_seconds[k] += local_seconds[k];
    }

#pragma omp parallel
    {
      std::vector<double> work(p);
      std::vector<double> draw;
      std::vector<double> local_seconds(nq, 0.0);
#pragma omp for schedule(dynamic, 4)
      for (std::size_t i = b0; i < b1; ++i) {
        const std::span<const double> row(rows.data() + i * p, p);
        for (std::size_t q = 0; q < nq; ++q) {
          const auto t0 = Clock::now();
          const auto& set = sets[set_of[q]];
          const auto& sw = block_weights[(i - b0) * ns + set_of[q]];
          const auto& s = s_of[q];
          const std::span<const double> cum = set.c.empty() ? std::span<const double>(prior_cum) : sw.cum;
          const std::uint64_t seed = derive_seed(queries[q].seed, keys[i]);
          std::copy(row.begin(), row.end(), work.begin());
          draw.resize(s.size());
          double sum = 0.0;
          for (std::size_t r = 0; r < queries[q].replicates; ++r) {
            detail::draw_replicate(model, cum, sw.leaves, s, seed, r, draw);
            for (std::size_t k = 0; k < s.size(); ++k) work[s[k]] = draw[k];
            const double e = learner.predict_row(work) - td.y[i];
            sum += e * e - base_sq[i];
          }
          delta[q][i] = sum / static_cast<double>(queries[q].replicates);
          local_seconds[q] += seconds_since(t0);
        }
      }
#pragma omp critical
      for (std::size_t q = 0; q < nq; ++q) query_seconds[q] += local_seconds[q];
    }
  }

  std::vector<ImportanceReport> reports(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const auto k = set_of[q];
    auto& rep = reports[q];
    rep.method = Method::CArfi;
    rep.features = s_of[q];
    rep.conditioning = sets[k].c;
    rep.replicates = queries[q].replicates;
    rep.loss = queries[q].loss;
    rep.seed = queries[q].seed;
    rep.extrapolated = static_cast<std::size_t>(std::count(extrapolated[k].begin(), extrapolated[k].end(), 1));
    rep.times.conditioning = set_seconds[k];
    rep.times.sampling = query_seconds[q];
    detail::finish_report(rep, base_sq, delta[q]);
  }
  return reports;
}

ImportanceReport carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                       const ImportanceQuery& query) {
  return carfi(test, learner, model, std::span<const ImportanceQuery>(&query, 1)).front();
}

ImportanceReport pfi(const Dataset& test, const Learner& learner, const std::vector<std::size_t>& features,
                     std::size_t permutations, LossFn loss, std::uint64_t seed) {
  const auto td = TestData::from(test);
  const Dataset& x = td.features;
  detail::check_compatible(x.schema(), learner, nullptr);
  ImportanceQuery probe{features, std::vector<std::size_t>{}, permutations, loss, seed};
  resolve_conditioning(probe, x.num_cols());
  const std::size_t n = x.num_rows(), p = x.num_cols();
  if (n < 2) throw InputError("importance needs at least two test instances");
  auto s = features;
  std::sort(s.begin(), s.end());

  std::vector<std::vector<std::uint32_t>> perms(permutations, std::vector<std::uint32_t>(n));
  for (std::size_t r = 0; r < permutations; ++r) {
    auto& perm = perms[r];
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    Rng rng(derive_seed(seed, r));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
  }

  const auto rows = x.row_major();
  std::vector<double> base_sq(n), delta(n);
  const auto t0 = Clock::now();
#pragma omp parallel
  {
    std::vector<double> work(p);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> row(rows.data() + i * p, p);
      const double e0 = learner.predict_row(row) - td.y[i];
      base_sq[i] = e0 * e0;
      std::copy(row.begin(), row.end(), work.begin());
      double sum = 0.0;
      for (std::size_t r = 0; r < permutations; ++r) {
        const std::size_t src = perms[r][i];
        for (auto j : s) work[j] = rows[src * p + j];
        const double e = learner.predict_row(work) - td.y[i];
        sum += e * e - base_sq[i];
      }
      delta[i] = sum / static_cast<double>(permutations);
    }
  }
  ImportanceReport rep;
  rep.method = Method::Pfi;
  rep.features = s;
  rep.replicates = permutations;
  rep.loss = loss;
  rep.seed = seed;
  rep.times.sampling = seconds_since(t0);
  detail::finish_report(rep, base_sq, delta);
  return rep;
}

std::vector<ImportanceReport> importance_profile(const Dataset& test, const Learner& learner,
                                                 const DensityModel& model, const std::vector<std::size_t>& features,
                                                 const std::vector<std::vector<std::size_t>>& conditioning_sets,
                                                 std::size_t replicates, LossFn loss, std::uint64_t seed) {
  std::vector<ImportanceQuery> queries;
  for (const auto& c : conditioning_sets) queries.push_back(ImportanceQuery{features, c, replicates, loss, seed});
  return carfi(test, learner, model, queries);
}

}  // namespace carfi
