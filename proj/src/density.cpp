#include "carfi/density.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace carfi {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

// ---- FeatureDensity / LeafDensity -----------------------------------------

FeatureDensity FeatureDensity::gaussian(TruncatedNormal tn) {
  FeatureDensity d;
  d.gaussian_ = tn;
  return d;
}

FeatureDensity FeatureDensity::categorical(std::vector<double> probs) {
  if (probs.empty()) throw InputError("categorical density needs at least one level");
  double sum = 0.0;
  for (double q : probs) {
    if (!(q >= 0.0)) throw InputError("categorical probabilities must be non-negative");
    sum += q;
  }
  if (!(sum > 0.0)) throw InputError("categorical probabilities must not all be zero");
  for (auto& q : probs) q /= sum;
  FeatureDensity d;
  d.log_probs_.resize(probs.size());
  std::transform(probs.begin(), probs.end(), d.log_probs_.begin(), [](double q) { return std::log(q); });
  d.probs_ = std::move(probs);
  return d;
}

double FeatureDensity::sample(Rng& rng) const {
  if (probs_.empty()) return gaussian_.sample(rng);
  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (probs_[k] <= 0.0) continue;
    cum += probs_[k];
    last = k;
    if (u < cum) return static_cast<double>(k);
  }
  return static_cast<double>(last);
}

double LeafDensity::log_density(std::span<const double> row) const {
  double s = 0.0;
  for (std::size_t j = 0; j < features.size(); ++j) s += features[j].log_pdf(row[j]);
  return s;
}

// ---- DensityModel ---------------------------------------------------------

DensityModel::DensityModel(Schema schema, std::vector<LeafDensity> leaves, FordeOptions options)
    : schema_(std::move(schema)), options_(options) {
  double total = 0.0;
  for (auto& l : leaves) {
    if (!(l.weight >= 0.0)) throw InputError("leaf weights must be non-negative");
    if (l.features.size() != schema_.size()) throw InputError("leaf density does not cover every feature");
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      const auto& kind = schema_.column(j).kind;
      if (kind.is_categorical() != l.features[j].is_categorical() ||
          (kind.is_categorical() && kind.num_levels() != l.features[j].probs().size())) {
        throw InputError("leaf density kind does not match column '" + schema_.column(j).name + "'");
      }
    }
    if (l.weight > 0.0) {
      total += l.weight;
      leaves_.push_back(std::move(l));
    }
  }
  if (leaves_.empty() || !(total > 0.0)) throw InputError("density model has no leaf with positive weight");
  std::vector<std::size_t> ids;
  for (auto& l : leaves_) {
    l.weight /= total;
    weights_.push_back(l.weight);
    log_weights_.push_back(std::log(l.weight));
    ids.push_back(l.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("duplicate leaf id");
}

// ---- FORDE ----------------------------------------------------------------

DensityModel forde(const ArfModel& arf, const FordeOptions& options) {
  if (!(options.epsilon >= 0.0)) throw InputError("smoothing epsilon must be >= 0");
  const Forest& forest = arf.forest();
  const Dataset& real = arf.data();
  const Schema& schema = real.schema();
  const std::size_t n = real.num_rows();
  const std::size_t p = real.num_cols();
  const double trees = static_cast<double>(forest.num_trees());

  const auto leaf_of = forest.apply(real);
  const auto regions = leaf_regions(forest);

  std::vector<std::vector<std::uint32_t>> members(forest.num_leaves());
  std::vector<std::size_t> tree_of(forest.num_leaves());
  for (std::size_t t = 0; t < leaf_of.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(leaf_of[t][i])].push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t t = 0; t < forest.num_trees(); ++t) {
    for (const auto& node : forest.trees()[t].nodes()) {
      if (node.is_leaf()) tree_of[static_cast<std::size_t>(node.leaf_id)] = t;
    }
  }

  std::vector<double> sd_floor(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (schema.column(j).kind.is_categorical()) continue;
    const auto col = real.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    sd_floor[j] = options.sd_floor * (sd > 0.0 ? sd : std::max(1.0, std::fabs(mean)));
  }

  std::vector<LeafDensity> leaves;
  for (std::size_t leaf = 0; leaf < members.size(); ++leaf) {
    const auto& rows = members[leaf];
    if (rows.empty()) continue;  // synthetic-only leaf: no parameters, zero weight
    const auto& region = regions[leaf];
    LeafDensity ld;
    ld.id = leaf;
    ld.tree = tree_of[leaf];
    ld.weight = static_cast<double>(rows.size()) / static_cast<double>(n) / trees;
    ld.features.reserve(p);
    for (std::size_t j = 0; j < p; ++j) {
      const auto& kind = schema.column(j).kind;
      if (kind.is_categorical()) {
        std::vector<double> probs(kind.num_levels(), 0.0);
        for (auto r : rows) probs[static_cast<std::size_t>(real.at(r, j))] += 1.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
          if (region.admissible[j][k]) probs[k] += options.epsilon;
        }
        ld.features.push_back(FeatureDensity::categorical(std::move(probs)));
        continue;
      }
      double mean = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto r : rows) {
        const double v = real.at(r, j);
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      mean /= static_cast<double>(rows.size());
      double ss = 0.0;
      for (auto r : rows) ss += (real.at(r, j) - mean) * (real.at(r, j) - mean);
      double sd = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
      sd = std::max(sd, sd_floor[j]);

      double lower = region.lower[j], upper = region.upper[j];
      if (options.finite_bounds == FiniteBounds::Local) {
        if (!std::isfinite(lower)) lower = lo;
        if (!std::isfinite(upper)) upper = hi;
      }
      if (!(lower < upper)) {
        // Every row shares one value: widen by the sd, staying in the region.
        lower = std::max(region.lower[j], mean - sd);
        upper = std::min(region.upper[j], mean + sd);
        if (!(lower < upper)) upper = lower + sd;
      }
      ld.features.push_back(FeatureDensity::gaussian(TruncatedNormal(mean, sd, lower, upper)));
    }
    leaves.push_back(std::move(ld));
  }
  if (leaves.empty()) throw InputError("no leaf of the forest holds real data");
  return DensityModel(schema, std::move(leaves), options);
}

// ---- evaluation / conditioning --------------------------------------------

double log_joint_density(const DensityModel& model, std::span<const double> row) {
  if (row.size() != model.schema().size()) throw InputError("row width does not match the density model");
  std::vector<double> terms(model.num_leaves());
  double mx = kNegInf;
  for (std::size_t l = 0; l < terms.size(); ++l) {
    terms[l] = model.log_weights()[l] + model.leaf(l).log_density(row);
    mx = std::max(mx, terms[l]);
  }
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

double joint_density(const DensityModel& model, std::span<const double> row) {
  return std::exp(log_joint_density(model, row));
}

namespace detail {

bool normalize_log_weights(std::span<double> log_w) {
  double mx = kNegInf;
  for (double v : log_w) mx = std::max(mx, v);
  if (mx == kNegInf) return false;
  double total = 0.0;
  for (auto& v : log_w) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : log_w) v /= total;
  return true;
}

std::vector<double> fallback_weights(const DensityModel& model, std::span<const double> prior,
                                     const Evidence& evidence) {
  struct Score {
    std::size_t violations;
    double loglik;
    std::size_t leaf;
  };
  std::vector<Score> scores;
  for (std::size_t l = 0; l < model.num_leaves(); ++l) {
    if (!(prior[l] > 0.0)) continue;
    Score s{0, std::log(prior[l]), l};
    for (const auto& [j, x] : evidence.assignments()) {
      const auto& fd = model.leaf(l).features[j];
      double lp = fd.log_pdf(x);
      if (lp == kNegInf) {
        ++s.violations;
        if (!fd.is_categorical()) {
          const auto& g = fd.gaussian();
          const double z = (x - g.mean()) / g.sd();
          lp = -0.5 * z * z - std::log(g.sd());
        } else {
          lp = 0.0;
        }
      }
      s.loglik += lp;
    }
    scores.push_back(s);
  }
  const std::size_t k = std::min(kFallbackLeaves, scores.size());
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end(),
                    [](const Score& a, const Score& b) {
                      if (a.violations != b.violations) return a.violations < b.violations;
                      if (a.loglik != b.loglik) return a.loglik > b.loglik;
                      return a.leaf < b.leaf;
                    });
  std::vector<double> w(model.num_leaves(), 0.0);
  for (std::size_t q = 0; q < k; ++q) w[scores[q].leaf] = 1.0 / static_cast<double>(k);
  return w;
}

}  // namespace detail

namespace {

void check_evidence(const DensityModel& model, const Evidence& evidence) {
  for (const auto& [j, x] : evidence.assignments()) {
    if (j >= model.schema().size()) throw InputError("evidence column out of range");
    (void)x;
  }
}

ConditionalWeights condition_impl(const DensityModel& model, std::span<const double> prior, const Evidence& evidence) {
  ConditionalWeights out;
  out.evidence = evidence;
  std::vector<double> log_w(model.num_leaves());
  for (std::size_t l = 0; l < log_w.size(); ++l) {
    double ll = 0.0;
    for (const auto& [j, x] : evidence.assignments()) ll += model.leaf(l).features[j].log_pdf(x);
    log_w[l] = std::log(prior[l]) + ll;
  }
  if (detail::normalize_log_weights(log_w)) {
    out.weights = std::move(log_w);
  } else {
    out.weights = detail::fallback_weights(model, prior, evidence);
    out.extrapolated = true;
  }
  return out;
}

}  // namespace

ConditionalWeights condition(const DensityModel& model, const Evidence& evidence) {
  check_evidence(model, evidence);
  if (evidence.empty()) {
    ConditionalWeights out;
    out.weights.assign(model.weights().begin(), model.weights().end());
    return out;
  }
  return condition_impl(model, model.weights(), evidence);
}

ConditionalWeights condition(const DensityModel& model, const ConditionalWeights& prior, const Evidence& evidence) {
  check_evidence(model, evidence);
  if (prior.weights.size() != model.num_leaves()) throw InputError("prior weights do not match the model");
  auto merged = prior.evidence.merged(evidence);
  if (evidence.empty()) {
    auto out = prior;
    out.evidence = std::move(merged);
    return out;
  }
  auto out = condition_impl(model, prior.weights, evidence);
  out.evidence = std::move(merged);
  out.extrapolated = out.extrapolated || prior.extrapolated;
  return out;
}

}  // namespace carfi
