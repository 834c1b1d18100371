#include "carfi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "carfi/density.hpp"
#include "carfi/importance.hpp"
#include "carfi/learners.hpp"
#include "carfi/sampling.hpp"

namespace carfi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs fn(0..count-1) over a worker pool; the first exception is rethrown.
template <typename Fn>
void run_parallel(std::size_t count, Fn fn) {
  std::exception_ptr error;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < count; ++k) {
    try {
      fn(k);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

ForestParams learner_params(int trees, int min_node_size) {
  ForestParams p;
  p.num_trees = trees;
  p.min_node_size = min_node_size;
  return p;
}

FordeOptions forde_options(FiniteBounds bounds) {
  FordeOptions o;
  o.finite_bounds = bounds;
  return o;
}

ArfConfig arf_config(int trees, int min_node_size, std::uint64_t seed) {
  ArfConfig c;
  c.num_trees = trees;
  c.min_node_size = min_node_size;
  c.seed = seed;
  return c;
}

void check_split_sizes(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  if (n_train < 2 || n - n_train < 2) throw InputError("sample size too small for the train/test split");
}

void check_common(std::size_t runs, int arf_trees, int learner_trees, int learner_min_node_size) {
  if (runs < 1) throw InputError("need at least one run");
  if (arf_trees < 1 || learner_trees < 1) throw InputError("tree counts must be >= 1");
  if (learner_min_node_size < 1) throw InputError("learner min node size must be >= 1");
}

bool rejects(double p, double alpha) { return p < alpha; }

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty entry in list '" + text + "'");
    out.push_back(cur.substr(b, e - b + 1));
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

// ---- proof of concept -----------------------------------------------------

std::vector<PocRecord> simulate_poc(const PocConfig& config) {
  check_common(config.runs, config.arf_trees, config.learner_trees, config.learner_min_node_size);
  check_split_sizes(config.n, config.train_fraction);
  if (config.learners.empty() || config.min_node_sizes.empty()) throw InputError("need learners and node sizes");
  for (int m : config.min_node_sizes) {
    if (m < 1) throw InputError("min node size must be >= 1");
  }
  constexpr std::size_t p = 10;
  const auto betas = default_betas(p);
  std::vector<std::vector<PocRecord>> per_run(config.runs);

  run_parallel(config.runs, [&](std::size_t run) {
    const auto data = gen_toeplitz(config.n, p, betas, config.setting, derive_seed(config.seed, 1, run));
    const auto [train, test] = split(data, config.train_fraction, derive_seed(config.seed, 2, run));
    const auto train_x = train.split_target().first;
    std::vector<std::unique_ptr<Learner>> learners;
    for (std::size_t li = 0; li < config.learners.size(); ++li) {
      learners.push_back(fit_learner(config.learners[li], train,
                                     learner_params(config.learner_trees, config.learner_min_node_size),
                                     derive_seed(config.seed, 3, run, li)));
    }
    std::vector<ImportanceQuery> qs(p);
    for (std::size_t j = 0; j < p; ++j) {
      qs[j].features = {j};
      qs[j].replicates = config.replicates;
      qs[j].seed = derive_seed(config.seed, 5, run);
    }
    for (int m : config.min_node_sizes) {
      const auto arf = fit_arf(train_x, arf_config(config.arf_trees, m, derive_seed(config.seed, 4, run, m)));
      const auto model = forde(arf, forde_options(config.finite_bounds));
      for (std::size_t li = 0; li < learners.size(); ++li) {
        const auto reports = carfi(test, *learners[li], model, qs);
        for (std::size_t j = 0; j < p; ++j) {
          per_run[run].push_back(PocRecord{run, config.learners[li], m, j, betas[j], reports[j].estimate,
                                           reports[j].test.t, reports[j].test.p_value, arf.iterations()});
        }
      }
    }
  });

  std::vector<PocRecord> out;
  for (auto& r : per_run) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<PocRate> poc_rates(const std::vector<PocRecord>& records, double alpha) {
  std::map<std::tuple<std::string, int, double>, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : records) {
    auto& c = counts[{r.learner, r.min_node_size, r.effect}];
    c.first += rejects(r.p_value, alpha);
    ++c.second;
  }
  std::vector<PocRate> out;
  for (const auto& [k, c] : counts) {
    out.push_back(PocRate{std::get<0>(k), std::get<1>(k), std::get<2>(k),
                          static_cast<double>(c.first) / static_cast<double>(c.second), c.second});
  }
  return out;
}

namespace {

void poc_comments(Table& t, const PocConfig& c) {
  t.comment("simulate poc: " + std::to_string(c.runs) + " runs of n=" + std::to_string(c.n) +
            " (desk-scale replicate count; read rejection rates with binomial error bands)");
  t.comment("setting=" + std::string(c.setting == Setting::Linear ? "linear" : "nonlinear") +
            " learners=" + join(c.learners, "+") + " alpha=" + cell(c.alpha) +
            " finite_bounds=" + finite_bounds_name(c.finite_bounds));
}

}  // namespace

Table poc_table(const PocConfig& config, const std::vector<PocRecord>& records) {
  Table t({"run", "learner", "feature", "effect_size", "estimate", "t", "p_value", "arf_iterations", "min_node_size",
           "arf_trees", "learner_trees", "replicates", "loss", "seed"});
  poc_comments(t, config);
  for (const auto& r : records) {
    t.add({cell(r.run), r.learner, "x" + std::to_string(r.feature + 1), cell(r.effect), cell(r.estimate), cell(r.t),
           cell(r.p_value), std::to_string(r.arf_iterations), std::to_string(r.min_node_size),
           std::to_string(config.arf_trees), std::to_string(config.learner_trees), cell(config.replicates), "mse",
           std::to_string(config.seed)});
  }
  return t;
}

Table poc_summary_table(const PocConfig& config, const std::vector<PocRate>& rates) {
  Table t({"learner", "min_node_size", "effect_size", "rejection_rate", "runs", "arf_trees", "learner_trees",
           "replicates", "loss", "seed"});
  poc_comments(t, config);
  for (const auto& r : rates) {
    t.add({r.learner, std::to_string(r.min_node_size), cell(r.effect), cell(r.rate), cell(r.runs),
           std::to_string(config.arf_trees), std::to_string(config.learner_trees), cell(config.replicates), "mse",
           std::to_string(config.seed)});
  }
  return t;
}

// ---- mixed-data DAG -------------------------------------------------------

MixedResult simulate_mixed(const MixedConfig& config) {
  check_common(config.runs, config.arf_trees, config.learner_trees, config.learner_min_node_size);
  if (config.sample_sizes.empty() || config.replicate_counts.empty()) throw InputError("need sample sizes and R values");
  for (auto n : config.sample_sizes) check_split_sizes(n, config.train_fraction);
  for (auto r : config.replicate_counts) {
    if (r < 1) throw InputError("replicate counts must be >= 1");
  }
  if (config.sampling_seeds < 1) throw InputError("need at least one sampling seed");
  if (config.min_node_size < 1) throw InputError("min node size must be >= 1");

  const std::size_t cells = config.runs * config.sample_sizes.size();
  std::vector<MixedResult> per_cell(cells);
  run_parallel(cells, [&](std::size_t c) {
    const std::size_t run = c / config.sample_sizes.size();
    const std::size_t n = config.sample_sizes[c % config.sample_sizes.size()];
    auto& res = per_cell[c];
    const auto data = gen_mixed_dag(n, config.dag, derive_seed(config.seed, 1, run, n));
    const auto [train, test] = split(data, config.train_fraction, derive_seed(config.seed, 2, run, n));
    const auto train_x = train.split_target().first;
    const auto learner = fit_learner(config.learner, train,
                                     learner_params(config.learner_trees, config.learner_min_node_size),
                                     derive_seed(config.seed, 3, run, n));
    auto t0 = Clock::now();
    const auto arf =
        fit_arf(train_x, arf_config(config.arf_trees, config.min_node_size, derive_seed(config.seed, 4, run, n)));
    const double arf_time = seconds_since(t0);
    t0 = Clock::now();
    const auto model = forde(arf, forde_options(config.finite_bounds));
    const double forde_time = seconds_since(t0);

    const std::size_t p = train_x.num_cols();
    struct Slot {
      std::size_t reps, k, j;
    };
    std::vector<ImportanceQuery> qs;
    std::vector<Slot> slots;
    for (auto reps : config.replicate_counts) {
      for (std::size_t k = 0; k < config.sampling_seeds; ++k) {
        for (std::size_t j = 0; j < p; ++j) {
          if (k > 0 && std::find(config.seed_features.begin(), config.seed_features.end(), j) == config.seed_features.end()) {
            continue;
          }
          ImportanceQuery q;
          q.features = {j};
          q.replicates = reps;
          q.seed = derive_seed(config.seed, 5, run, n, k);
          qs.push_back(std::move(q));
          slots.push_back({reps, k, j});
        }
      }
    }
    const auto reports = carfi(test, *learner, model, qs);
    for (auto reps : config.replicate_counts) {
      MixedTiming tm{run, n, reps, arf_time, forde_time, 0.0, 0.0};
      for (std::size_t q = 0; q < qs.size(); ++q) {
        if (slots[q].reps != reps || slots[q].k != 0) continue;
        tm.conditioning += reports[q].times.conditioning;
        tm.sampling += reports[q].times.sampling;
      }
      res.timings.push_back(tm);
    }
    for (std::size_t q = 0; q < qs.size(); ++q) {
      res.records.push_back(MixedRecord{run, n, slots[q].reps, slots[q].k, slots[q].j, reports[q].estimate,
                                        reports[q].test.t, reports[q].test.p_value});
    }
  });

  MixedResult out;
  for (auto& r : per_cell) {
    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
    out.timings.insert(out.timings.end(), r.timings.begin(), r.timings.end());
  }
  return out;
}

std::vector<MixedRate> mixed_rates(const MixedResult& result, double alpha) {
  // (n, R, feature) -> per sampling seed (rejections, runs)
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::map<std::size_t, std::pair<double, double>>> acc;
  for (const auto& r : result.records) {
    auto& c = acc[{r.n, r.replicates, r.feature}][r.sampling_seed];
    c.first += rejects(r.p_value, alpha);
    c.second += 1.0;
  }
  std::vector<MixedRate> out;
  for (const auto& [key, by_seed] : acc) {
    std::vector<double> rates;
    for (const auto& [k, c] : by_seed) rates.push_back(c.first / c.second);
    MixedRate m;
    std::tie(m.n, m.replicates, m.feature) = key;
    m.rate = rates.front();
    if (rates.size() > 1) m.rate_sd = sample_sd(rates);
    m.runs = static_cast<std::size_t>(by_seed.begin()->second.second);
    out.push_back(m);
  }
  return out;
}

namespace {

void mixed_comments(Table& t, const MixedConfig& c) {
  t.comment("simulate mixed: " + std::to_string(c.runs) + " runs, learner=" + c.learner + ", beta=" + cell(c.dag.beta) +
            ", levels=" + std::to_string(c.dag.levels) + ", bin_noise=" + cell(c.dag.bin_noise) +
            ", finite_bounds=" + finite_bounds_name(c.finite_bounds) + " (desk-scale replicate count)");
  t.comment("rate_sd is the spread of the rejection rate across " + std::to_string(c.sampling_seeds) +
            " sampling seeds on the same fitted models, reported for the null features only");
}

}  // namespace

Table mixed_table(const MixedConfig& config, const MixedResult& result) {
  Table t({"run", "n", "replicates", "sampling_seed", "feature", "estimate", "t", "p_value", "min_node_size",
           "arf_trees", "learner_trees", "loss", "seed"});
  mixed_comments(t, config);
  for (const auto& r : result.records) {
    t.add({cell(r.run), cell(r.n), cell(r.replicates), cell(r.sampling_seed), "x" + std::to_string(r.feature + 1),
           cell(r.estimate), cell(r.t), cell(r.p_value), std::to_string(config.min_node_size),
           std::to_string(config.arf_trees), std::to_string(config.learner_trees), "mse", std::to_string(config.seed)});
  }
  return t;
}

Table mixed_summary_table(const MixedConfig& config, const std::vector<MixedRate>& rates) {
  Table t({"n", "replicates", "feature", "rejection_rate", "rate_sd", "runs", "min_node_size", "arf_trees",
           "learner_trees", "loss", "seed"});
  mixed_comments(t, config);
  for (const auto& r : rates) {
    t.add({cell(r.n), cell(r.replicates), "x" + std::to_string(r.feature + 1), cell(r.rate), r.rate_sd ? cell(*r.rate_sd) : std::string(),
           cell(r.runs), std::to_string(config.min_node_size), std::to_string(config.arf_trees),
           std::to_string(config.learner_trees), "mse", std::to_string(config.seed)});
  }
  return t;
}

Table mixed_timing_table(const MixedConfig& config, const MixedResult& result) {
  Table t({"run", "n", "replicates", "arf_fit_s", "forde_s", "conditioning_s", "sampling_s", "min_node_size",
           "arf_trees", "seed"});
  mixed_comments(t, config);
  for (const auto& r : result.timings) {
    t.add({cell(r.run), cell(r.n), cell(r.replicates), cell(r.arf_fit), cell(r.forde), cell(r.conditioning),
           cell(r.sampling), std::to_string(config.min_node_size), std::to_string(config.arf_trees),
           std::to_string(config.seed)});
  }
  return t;
}

// ---- conditioning-set DAG -------------------------------------------------

std::vector<CondsetRecord> simulate_condset(const CondsetConfig& config) {
  check_common(config.runs, config.arf_trees, config.learner_trees, config.learner_min_node_size);
  check_split_sizes(config.n, config.train_fraction);
  if (config.learners.empty()) throw InputError("need at least one learner");
  if (config.min_node_size < 1) throw InputError("min node size must be >= 1");
  if (config.replicates < 1 || config.permutations < 1) throw InputError("replicates and permutations must be >= 1");

  const std::vector<std::size_t> targets{2, 3};  // x3, x4
  const std::vector<std::optional<std::vector<std::size_t>>> sets{
      std::vector<std::size_t>{}, std::vector<std::size_t>{0}, std::vector<std::size_t>{1},
      std::vector<std::size_t>{4}, std::vector<std::size_t>{0, 1}, std::nullopt};
  std::vector<std::vector<CondsetRecord>> per_run(config.runs);

  run_parallel(config.runs, [&](std::size_t run) {
    const auto data = gen_condset_dag(config.n, derive_seed(config.seed, 1, run));
    const auto [train, test] = split(data, config.train_fraction, derive_seed(config.seed, 2, run));
    const auto train_x = train.split_target().first;
    const Schema& fs = train_x.schema();
    const auto arf =
        fit_arf(train_x, arf_config(config.arf_trees, config.min_node_size, derive_seed(config.seed, 4, run)));
    const auto model = forde(arf, forde_options(config.finite_bounds));

    std::vector<ImportanceQuery> qs;
    for (auto j : targets) {
      for (const auto& c : sets) qs.push_back(ImportanceQuery{{j}, c, config.replicates, LossFn::MSE,
                                                              derive_seed(config.seed, 5, run)});
    }
    for (std::size_t li = 0; li < config.learners.size(); ++li) {
      const auto learner = fit_learner(config.learners[li], train,
                                       learner_params(config.learner_trees, config.learner_min_node_size),
                                       derive_seed(config.seed, 3, run, li));
      const std::string& lname = config.learners[li];
      for (auto j : targets) {
        const auto r = pfi(test, *learner, {j}, config.permutations, LossFn::MSE, derive_seed(config.seed, 6, run));
        per_run[run].push_back(CondsetRecord{run, lname, fs.column(j).name, "pfi", "-", r.estimate, r.test.t,
                                             r.test.p_value});
      }
      const auto reports = carfi(test, *learner, model, qs);
      for (const auto& r : reports) {
        const bool all = r.conditioning.size() + 1 == fs.size();
        per_run[run].push_back(CondsetRecord{run, lname, fs.column(r.features[0]).name, "carfi",
                                             all ? "all" : describe_columns(fs, r.conditioning), r.estimate, r.test.t,
                                             r.test.p_value});
      }
    }
  });

  std::vector<CondsetRecord> out;
  for (auto& r : per_run) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<CondsetMean> condset_means(const std::vector<CondsetRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<double>> acc;
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> order;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.learner, r.feature, r.method, r.conditioning);
    if (!acc.count(key)) order.push_back(key);
    acc[key].push_back(r.estimate);
  }
  std::vector<CondsetMean> out;
  for (const auto& key : order) {
    const auto& v = acc[key];
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    out.push_back(CondsetMean{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), m, sample_sd(v),
                              v.size()});
  }
  return out;
}

namespace {

void condset_comments(Table& t, const CondsetConfig& c) {
  t.comment("simulate condset: " + std::to_string(c.runs) + " runs of n=" + std::to_string(c.n) +
            ", learners=" + join(c.learners, "+") + ", pfi permutations=" + std::to_string(c.permutations) +
            ", finite_bounds=" + finite_bounds_name(c.finite_bounds));
}

}  // namespace

Table condset_table(const CondsetConfig& config, const std::vector<CondsetRecord>& records) {
  Table t({"run", "learner", "feature", "method", "conditioning", "estimate", "t", "p_value", "min_node_size",
           "arf_trees", "learner_trees", "replicates", "loss", "seed"});
  condset_comments(t, config);
  for (const auto& r : records) {
    t.add({cell(r.run), r.learner, r.feature, r.method, r.conditioning, cell(r.estimate), cell(r.t), cell(r.p_value),
           std::to_string(config.min_node_size), std::to_string(config.arf_trees),
           std::to_string(config.learner_trees), cell(r.method == "pfi" ? config.permutations : config.replicates),
           "mse", std::to_string(config.seed)});
  }
  return t;
}

Table condset_summary_table(const CondsetConfig& config, const std::vector<CondsetMean>& means) {
  Table t({"learner", "feature", "method", "conditioning", "mean_estimate", "sd_estimate", "runs", "min_node_size",
           "arf_trees", "learner_trees", "replicates", "loss", "seed"});
  condset_comments(t, config);
  for (const auto& m : means) {
    t.add({m.learner, m.feature, m.method, m.conditioning, cell(m.mean), cell(m.sd), cell(m.runs),
           std::to_string(config.min_node_size), std::to_string(config.arf_trees),
           std::to_string(config.learner_trees),
           cell(m.method == "pfi" ? config.permutations : config.replicates), "mse", std::to_string(config.seed)});
  }
  return t;
}

// ---- ad-hoc analysis ------------------------------------------------------

namespace {

Dataset load(const std::filesystem::path& path, const std::optional<std::filesystem::path>& schema) {
  std::optional<Schema> hint;
  if (schema) hint = read_schema(*schema);
  return read_csv(path, hint);
}

Dataset with_target(const Dataset& data, const std::string& target) {
  data.schema().index_of(target);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < data.num_cols(); ++j) cols.emplace_back(data.column(j).begin(), data.column(j).end());
  return Dataset(data.schema().with_target(target), std::move(cols));
}

std::vector<std::size_t> column_set(const Schema& schema, const std::string& text, char sep) {
  std::vector<std::size_t> out;
  for (const auto& name : split_list(text, sep)) out.push_back(schema.index_of(name));
  return out;
}

}  // namespace

Table run_importance(const ImportanceOptions& o) {
  if (o.target.empty()) throw InputError("--target is required");
  if (o.method != "carfi" && o.method != "pfi" && o.method != "both") {
    throw InputError("unknown method '" + o.method + "' (expected carfi, pfi or both)");
  }
  if (o.replicates < 1) throw InputError("replicates must be >= 1");
  const LossFn loss = parse_loss(o.loss);
  const auto data = with_target(load(o.data, o.schema), o.target);
  const auto [train, test] = split(data, o.train_fraction, derive_seed(o.seed, 2));
  const auto train_x = train.split_target().first;
  const Schema& fs = train_x.schema();

  std::vector<std::vector<std::size_t>> sets;
  if (o.features.empty()) {
    for (std::size_t j = 0; j < fs.size(); ++j) sets.push_back({j});
  } else {
    for (const auto& f : o.features) sets.push_back(column_set(fs, f, '+'));
  }
  std::optional<std::vector<std::size_t>> cond;
  if (o.condition == "none") {
    cond = std::vector<std::size_t>{};
  } else if (o.condition != "all") {
    cond = column_set(fs, o.condition, ',');
  }

  const auto learner = fit_learner(o.learner, train, learner_params(o.learner_trees, o.learner_min_node_size),
                                   derive_seed(o.seed, 3));
  std::vector<ImportanceReport> reports;
  int iterations = 0;
  if (o.method != "pfi") {
    const auto arf = fit_arf(train_x, arf_config(o.arf_trees, o.min_node_size, derive_seed(o.seed, 4)));
    iterations = arf.iterations();
    const auto model = forde(arf, forde_options(o.finite_bounds));
    std::vector<ImportanceQuery> qs;
    for (const auto& s : sets) qs.push_back(ImportanceQuery{s, cond, o.replicates, loss, derive_seed(o.seed, 5)});
    auto r = carfi(test, *learner, model, qs);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (o.method != "carfi") {
    for (const auto& s : sets) reports.push_back(pfi(test, *learner, s, o.replicates, loss, derive_seed(o.seed, 6)));
  }
  // The master seed reproduces the whole run; per-query seeds derive from it.
  for (auto& r : reports) r.seed = o.seed;
  Table t = report_table(fs, reports,
                         {{"learner", o.learner},
                          {"min_node_size", std::to_string(o.min_node_size)},
                          {"arf_trees", std::to_string(o.arf_trees)},
                          {"learner_trees", std::to_string(o.learner_trees)},
                          {"train_fraction", cell(o.train_fraction)},
                          {"n_train", cell(train.num_rows())},
                          {"arf_iterations", std::to_string(iterations)},
                          {"finite_bounds", finite_bounds_name(o.finite_bounds)}});
  t.comment("target=" + o.target + " data=" + o.data.filename().string());
  t.comment("estimate is the mean per-instance squared-error increase; with loss=rmse, loss_difference is the "
            "RMSE difference and the test still uses squared errors");
  return t;
}

const char* finite_bounds_name(FiniteBounds b) { return b == FiniteBounds::Local ? "local" : "none"; }

Evidence parse_evidence(const Schema& schema, const std::string& text) {
  std::vector<std::pair<std::size_t, double>> a;
  if (text.empty()) return Evidence();
  for (const auto& item : split_list(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("condition '" + item + "' is not of the form col=value");
    auto name = item.substr(0, eq), value = item.substr(eq + 1);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    const std::size_t j = schema.index_of(name);
    const auto& kind = schema.column(j).kind;
    if (kind.is_categorical()) {
      const auto level = kind.level_index(value);
      if (!level) throw InputError("unknown level '" + value + "' for column '" + name + "'");
      a.emplace_back(j, static_cast<double>(*level));
    } else {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size() || !std::isfinite(v)) {
        throw InputError("value '" + value + "' for column '" + name + "' is not a finite number");
      }
      a.emplace_back(j, v);
    }
  }
  return Evidence(schema, std::move(a));
}

Dataset run_generate(const GenerateOptions& o) {
  const auto data = load(o.data, o.schema);
  const auto evidence = parse_evidence(data.schema(), o.condition);
  const std::size_t n = o.n == 0 ? data.num_rows() : o.n;
  const auto arf = fit_arf(data, arf_config(o.arf_trees, o.min_node_size, derive_seed(o.seed, 1)));
  const auto model = forde(arf, forde_options(o.finite_bounds));
  if (evidence.empty()) return forge(model, n, derive_seed(o.seed, 2));
  return forge_conditional(model, evidence, n, derive_seed(o.seed, 2));
}

}  // namespace carfi
