#include "carfi/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "carfi/common.hpp"

namespace carfi {

// ---- Tree / LeafRegion ----------------------------------------------------

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

void Tree::assign_leaf_ids(std::int32_t first) {
  for (auto& n : nodes_) n.leaf_id = n.is_leaf() ? first++ : -1;
}

bool LeafRegion::contains(std::span<const double> row) const {
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!admissible[j].empty()) {
      if (!admissible[j][static_cast<std::size_t>(row[j])]) return false;
    } else if (!(row[j] > lower[j] && row[j] <= upper[j])) {
      return false;
    }
  }
  return true;
}

// ---- Forest ---------------------------------------------------------------

Forest::Forest(Schema features, Task task, std::size_t num_classes, ForestParams params, std::vector<Tree> trees)
    : features_(std::move(features)),
      task_(task),
      num_classes_(num_classes),
      params_(std::move(params)),
      trees_(std::move(trees)) {
  if (trees_.empty()) throw InputError("forest needs at least one tree");
  if (task_ == Task::Classification && num_classes_ < 2) throw InputError("classification needs >= 2 classes");
  std::int32_t next = 0;
  for (auto& t : trees_) {
    t.assign_leaf_ids(next);
    next += static_cast<std::int32_t>(t.num_leaves());
  }
  num_leaves_ = static_cast<std::size_t>(next);

  for (const auto& t : trees_) {
    roots_.push_back(flat_.size());
    for (const auto& n : t.nodes()) {
      FlatNode f{-1, n.leaf_id, -1, 0.0};
      if (!n.is_leaf()) {
        if (n.right != n.left + 1) throw InputError("tree children must be stored next to each other");
        f.feature = static_cast<std::int32_t>(n.rule.feature);
        f.next = n.left;
        f.split = n.rule.threshold;
        if (n.rule.is_categorical()) {
          f.mask = static_cast<std::int32_t>(masks_.size());
          masks_.insert(masks_.end(), n.rule.left_levels.begin(), n.rule.left_levels.end());
        }
      } else if (task_ == Task::Regression) {
        f.split = n.value.at(0);
      }
      flat_.push_back(f);
    }
  }
}

void Forest::check_rows(const Dataset& rows) const {
  if (!rows.schema().same_columns(features_)) throw InputError("rows do not match the forest's feature schema");
}

namespace {

std::size_t argmax_class(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double Forest::predict_row(std::span<const double> row) const {
  if (task_ == Task::Regression) {
    double sum = 0.0;
    for (std::size_t t = 0; t < trees_.size(); ++t) sum += flat_leaf(t, row).split;
    return sum / static_cast<double>(trees_.size());
  }
  std::vector<double> votes(num_classes_, 0.0);
  for (const auto& t : trees_) votes[argmax_class(t.leaf(row).value)] += 1.0;
  return static_cast<double>(argmax_class(votes));
}

std::vector<double> Forest::predict_proba_row(std::span<const double> row) const {
  if (task_ != Task::Classification) throw InputError("class probabilities need a classification forest");
  std::vector<double> votes(num_classes_, 0.0);
  for (const auto& t : trees_) votes[argmax_class(t.leaf(row).value)] += 1.0;
  for (auto& v : votes) v /= static_cast<double>(trees_.size());
  return votes;
}

std::vector<double> Forest::predict(const Dataset& rows) const {
  check_rows(rows);
  const auto data = rows.row_major();
  const std::size_t n = rows.num_rows();
  const std::size_t p = rows.num_cols();
  std::vector<double> out(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = predict_row(std::span<const double>(data).subspan(i * p, p));
  }
  return out;
}

std::vector<std::vector<std::int32_t>> Forest::apply(const Dataset& rows) const {
  check_rows(rows);
  const auto data = rows.row_major();
  const std::size_t n = rows.num_rows();
  const std::size_t p = rows.num_cols();
  std::vector<std::vector<std::int32_t>> out(trees_.size(), std::vector<std::int32_t>(n));
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      out[t][i] = flat_leaf(t, std::span<const double>(data).subspan(i * p, p)).next;
    }
  }
  return out;
}

// ---- growing --------------------------------------------------------------

namespace detail {

std::size_t resolve_mtry(const ForestParams& params, Task task, std::size_t p) {
  if (params.mtry) {
    if (*params.mtry < 1 || static_cast<std::size_t>(*params.mtry) > p) throw InputError("mtry must lie in [1, p]");
    return static_cast<std::size_t>(*params.mtry);
  }
  const double d = task == Task::Classification ? std::ceil(std::sqrt(static_cast<double>(p)))
                                                : std::ceil(static_cast<double>(p) / 3.0);
  return std::clamp<std::size_t>(static_cast<std::size_t>(d), 1, p);
}

GrowData make_grow_data(const Dataset& features, std::span<const double> y, Task task, std::size_t num_classes,
                        const ForestParams& params) {
  if (y.size() != features.num_rows()) throw InputError("target length does not match feature rows");
  if (params.num_trees < 1) throw InputError("num_trees must be >= 1");
  if (params.min_node_size < 1) throw InputError("min_node_size must be >= 1");
  GrowData g;
  for (std::size_t j = 0; j < features.num_cols(); ++j) {
    g.columns.push_back(features.column(j));
    g.num_levels.push_back(features.schema().column(j).kind.num_levels());
  }
  g.y = y;
  g.task = task;
  g.num_classes = num_classes;
  g.min_node_size = static_cast<std::size_t>(params.min_node_size);
  if (task == Task::Classification) {
    for (double v : y) {
      if (!(v >= 0 && v < static_cast<double>(num_classes) && v == std::floor(v))) {
        throw InputError("classification labels must be class indices");
      }
    }
  }
  return g;
}

namespace {

// Weighted node impurity: n - sum c_k^2 / n (Gini) or SSE (variance).
double node_impurity(const GrowData& d, std::span<const std::uint32_t> rows) {
  const double n = static_cast<double>(rows.size());
  if (d.task == Task::Classification) {
    std::vector<double> counts(d.num_classes, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(d.y[r])] += 1.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
  }
  double s = 0.0, ss = 0.0;
  for (auto r : rows) {
    s += d.y[r];
    ss += d.y[r] * d.y[r];
  }
  return std::max(0.0, ss - s * s / n);
}

bool is_pure(const GrowData& d, std::span<const std::uint32_t> rows) {
  const double first = d.y[rows[0]];
  return std::all_of(rows.begin(), rows.end(), [&](auto r) { return d.y[r] == first; });
}

std::vector<double> leaf_value(const GrowData& d, std::span<const std::uint32_t> rows) {
  const double n = static_cast<double>(rows.size());
  if (d.task == Task::Classification) {
    std::vector<double> freq(d.num_classes, 0.0);
    for (auto r : rows) freq[static_cast<std::size_t>(d.y[r])] += 1.0;
    for (auto& f : freq) f /= n;
    return freq;
  }
  double s = 0.0;
  for (auto r : rows) s += d.y[r];
  return {s / n};
}

double midpoint(double a, double b) {
  const double t = a + (b - a) / 2.0;
  return (t >= a && t < b) ? t : a;
}

SplitCandidate best_continuous(const GrowData& d, std::span<const std::uint32_t> rows, std::size_t feature) {
  const auto x = d.columns[feature];
  const std::size_t n = rows.size();
  std::vector<std::pair<double, double>> xy(n);
  for (std::size_t k = 0; k < n; ++k) xy[k] = {x[rows[k]], d.y[rows[k]]};
  std::sort(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  SplitCandidate best;
  if (xy.front().first == xy.back().first) return best;
  const std::size_t min = d.min_node_size;
  const double dn = static_cast<double>(n);

  if (d.task == Task::Classification) {
    std::vector<double> total(d.num_classes, 0.0), left(d.num_classes, 0.0);
    for (const auto& [xv, yv] : xy) total[static_cast<std::size_t>(yv)] += 1.0;
    double total_sq = 0.0;
    for (double c : total) total_sq += c * c;
    const double parent = total_sq / dn;
    double left_sq = 0.0, right_sq = total_sq;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const auto c = static_cast<std::size_t>(xy[k].second);
      left_sq += 2.0 * left[c] + 1.0;
      right_sq -= 2.0 * (total[c] - left[c]) - 1.0;
      left[c] += 1.0;
      if (xy[k].first == xy[k + 1].first) continue;
      const std::size_t nl = k + 1, nr = n - nl;
      if (nl < min || nr < min) continue;
      const double gain = left_sq / static_cast<double>(nl) + right_sq / static_cast<double>(nr) - parent;
      if (!best.found || gain > best.gain) {
        best.found = true;
        best.gain = gain;
        best.rule = SplitRule{feature, midpoint(xy[k].first, xy[k + 1].first), {}};
      }
    }
    return best;
  }

  double total = 0.0;
  for (const auto& [xv, yv] : xy) total += yv;
  const double parent = total * total / dn;
  double left = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    left += xy[k].second;
    if (xy[k].first == xy[k + 1].first) continue;
    const std::size_t nl = k + 1, nr = n - nl;
    if (nl < min || nr < min) continue;
    const double right = total - left;
    const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr) - parent;
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.rule = SplitRule{feature, midpoint(xy[k].first, xy[k + 1].first), {}};
    }
  }
  return best;
}

// Levels ordered by positive-class rate (class 1) or mean target, then
// prefixes of that order scanned as left sets.
SplitCandidate best_categorical(const GrowData& d, std::span<const std::uint32_t> rows, std::size_t feature) {
  const auto x = d.columns[feature];
  const std::size_t levels = d.num_levels[feature];
  const std::size_t k_classes = d.task == Task::Classification ? d.num_classes : 1;
  std::vector<double> count(levels, 0.0);
  std::vector<double> stat(levels * k_classes, 0.0);  // class counts or target sums
  for (auto r : rows) {
    const auto l = static_cast<std::size_t>(x[r]);
    count[l] += 1.0;
    if (d.task == Task::Classification) {
      stat[l * k_classes + static_cast<std::size_t>(d.y[r])] += 1.0;
    } else {
      stat[l] += d.y[r];
    }
  }
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < levels; ++l) {
    if (count[l] > 0) present.push_back(l);
  }
  SplitCandidate best;
  if (present.size() < 2) return best;

  auto key = [&](std::size_t l) {
    if (d.task == Task::Classification) return stat[l * k_classes + 1] / count[l];
    return stat[l] / count[l];
  };
  std::stable_sort(present.begin(), present.end(), [&](auto a, auto b) { return key(a) < key(b); });

  const double n = static_cast<double>(rows.size());
  const double min = static_cast<double>(d.min_node_size);
  std::vector<double> total(k_classes, 0.0), left(k_classes, 0.0);
  for (auto l : present) {
    for (std::size_t c = 0; c < k_classes; ++c) total[c] += stat[l * k_classes + c];
  }
  auto score = [&](const std::vector<double>& v, double size) {
    if (d.task == Task::Classification) {
      double sq = 0.0;
      for (double c : v) sq += c * c;
      return sq / size;
    }
    return v[0] * v[0] / size;
  };
  const double parent = score(total, n);
  std::vector<double> right(k_classes);
  double nl = 0.0;
  for (std::size_t k = 0; k + 1 < present.size(); ++k) {
    const auto l = present[k];
    nl += count[l];
    for (std::size_t c = 0; c < k_classes; ++c) left[c] += stat[l * k_classes + c];
    const double nr = n - nl;
    if (nl < min || nr < min) continue;
    for (std::size_t c = 0; c < k_classes; ++c) right[c] = total[c] - left[c];
    const double gain = score(left, nl) + score(right, nr) - parent;
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      std::vector<std::uint8_t> mask(levels, 0);
      for (std::size_t q = 0; q <= k; ++q) mask[present[q]] = 1;
      best.rule = SplitRule{feature, 0.0, std::move(mask)};
    }
  }
  return best;
}

}  // namespace

SplitCandidate best_split(const GrowData& data, std::span<const std::uint32_t> rows, std::size_t feature) {
  return data.num_levels[feature] > 0 ? best_categorical(data, rows, feature) : best_continuous(data, rows, feature);
}

Tree grow_tree(const GrowData& data, const ForestParams& params, std::size_t mtry, std::uint64_t seed,
               SplitFinder finder) {
  Rng rng(derive_seed(seed));
  const std::size_t n = data.y.size();
  const std::size_t p = data.columns.size();

  std::vector<std::uint32_t> sample;
  std::vector<std::uint32_t> oob;
  if (params.bootstrap) {
    std::vector<std::uint8_t> inbag(n, 0);
    sample.resize(n);
    for (auto& s : sample) {
      s = static_cast<std::uint32_t>(uniform_index(rng, n));
      inbag[s] = 1;
    }
    std::sort(sample.begin(), sample.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (!inbag[i]) oob.push_back(static_cast<std::uint32_t>(i));
    }
  } else {
    sample.resize(n);
    std::iota(sample.begin(), sample.end(), 0u);
  }

  std::vector<TreeNode> nodes(1);
  std::vector<std::vector<std::uint32_t>> pending(1);
  pending[0] = std::move(sample);
  std::vector<std::size_t> stack{0};
  std::vector<std::size_t> features(p);

  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    std::vector<std::uint32_t> rows = std::move(pending[id]);

    SplitCandidate best;
    if (rows.size() >= 2 * data.min_node_size && !is_pure(data, rows)) {
      std::iota(features.begin(), features.end(), std::size_t{0});
      for (std::size_t k = 0; k < mtry; ++k) std::swap(features[k], features[k + uniform_index(rng, p - k)]);
      std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));
      for (std::size_t k = 0; k < mtry; ++k) {
        auto cand = finder(data, rows, features[k]);
        if (cand.found && (!best.found || cand.gain > best.gain)) best = std::move(cand);
      }
      // Accepted splits must strictly reduce impurity beyond rounding noise.
      if (best.found && !(best.gain > 1e-10 * node_impurity(data, rows))) best.found = false;
    }

    if (!best.found) {
      nodes[id].value = leaf_value(data, rows);
      nodes[id].rows = std::move(rows);
      continue;
    }

    std::vector<std::uint32_t> left, right;
    const auto x = data.columns[best.rule.feature];
    for (auto r : rows) (best.rule.goes_left(x[r]) ? left : right).push_back(r);

    const auto l = nodes.size();
    nodes.emplace_back();
    nodes.emplace_back();
    pending.push_back(std::move(left));
    pending.push_back(std::move(right));
    nodes[id].left = static_cast<std::int32_t>(l);
    nodes[id].right = static_cast<std::int32_t>(l + 1);
    nodes[id].rule = std::move(best.rule);
    stack.push_back(l + 1);
    stack.push_back(l);
  }
  return Tree(std::move(nodes), std::move(oob));
}

}  // namespace detail

namespace {

std::size_t check_task(const Dataset& features, std::span<const double> y, Task task, std::size_t num_classes) {
  if (task == Task::Classification) {
    if (num_classes == 0) {
      double mx = 0.0;
      for (double v : y) mx = std::max(mx, v);
      num_classes = std::max<std::size_t>(2, static_cast<std::size_t>(mx) + 1);
    }
    return num_classes;
  }
  (void)features;
  return 0;
}

}  // namespace

Forest fit_forest(const Dataset& features, std::span<const double> y, Task task, const ForestParams& params,
                  std::uint64_t seed, std::size_t num_classes) {
  num_classes = check_task(features, y, task, num_classes);
  const auto data = detail::make_grow_data(features, y, task, num_classes, params);
  const std::size_t mtry = detail::resolve_mtry(params, task, features.num_cols());
  std::vector<Tree> trees(static_cast<std::size_t>(params.num_trees));
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < trees.size(); ++t) {
    trees[t] = detail::grow_tree(data, params, mtry, derive_seed(seed, t), &detail::best_split);
  }
  return Forest(features.schema().with_target(std::nullopt), task, num_classes, params, std::move(trees));
}

Forest fit_forest(const Dataset& data, const std::string& target, Task task, const ForestParams& params,
                  std::uint64_t seed) {
  const std::size_t t = data.schema().index_of(target);
  const auto& kind = data.schema().column(t).kind;
  if (task == Task::Classification && !kind.is_categorical()) {
    throw InputError("classification needs a categorical target, '" + target + "' is continuous");
  }
  if (task == Task::Regression && !kind.is_continuous()) {
    throw InputError("regression needs a continuous target, '" + target + "' is categorical");
  }
  const auto y = data.column(t);
  const std::vector<double> yv(y.begin(), y.end());
  return fit_forest(data.drop_col(t), yv, task, params, seed, kind.num_levels());
}

double oob_accuracy(const Forest& forest, const Dataset& features, std::span<const double> y) {
  if (forest.task() != Task::Classification) throw InputError("OOB accuracy needs a classification forest");
  if (!forest.params().bootstrap) throw InputError("OOB accuracy needs a forest fitted with bootstrap");
  if (y.size() != features.num_rows()) throw InputError("label length does not match rows");
  const std::size_t n = features.num_rows();
  const std::size_t p = features.num_cols();
  const std::size_t k = forest.num_classes();
  const auto& trees = forest.trees();

  std::vector<std::vector<std::uint8_t>> is_oob(trees.size(), std::vector<std::uint8_t>(n, 0));
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (auto r : trees[t].oob_rows()) {
      if (r >= n) throw InputError("OOB rows do not match the supplied data");
      is_oob[t][r] = 1;
    }
  }
  const auto data = features.row_major();
  std::size_t scored = 0, correct = 0;
#pragma omp parallel for schedule(static) reduction(+ : scored, correct)
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> votes(k, 0.0), prob(k, 0.0);
    bool any = false;
    const auto row = std::span<const double>(data).subspan(i * p, p);
    for (std::size_t t = 0; t < trees.size(); ++t) {
      if (!is_oob[t][i]) continue;
      const auto& value = trees[t].leaf(row).value;
      votes[argmax_class(value)] += 1.0;
      for (std::size_t c = 0; c < k; ++c) prob[c] += value[c];
      any = true;
    }
    if (!any) continue;
    // Vote ties are broken by the summed leaf class frequencies.
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && prob[c] > prob[best])) best = c;
    }
    ++scored;
    if (static_cast<double>(best) == y[i]) ++correct;
  }
  if (scored == 0) throw InputError("no row has out-of-bag votes");
  return static_cast<double>(correct) / static_cast<double>(scored);
}

std::vector<LeafRegion> leaf_regions(const Forest& forest) {
  const auto& schema = forest.features();
  const std::size_t p = schema.size();
  std::vector<LeafRegion> out(forest.num_leaves());

  LeafRegion root;
  root.lower.assign(p, -std::numeric_limits<double>::infinity());
  root.upper.assign(p, std::numeric_limits<double>::infinity());
  root.admissible.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (schema.column(j).kind.is_categorical()) root.admissible[j].assign(schema.column(j).kind.num_levels(), 1);
  }

  for (const auto& tree : forest.trees()) {
    const auto& nodes = tree.nodes();
    std::vector<std::pair<std::size_t, LeafRegion>> stack{{0, root}};
    while (!stack.empty()) {
      auto [k, region] = std::move(stack.back());
      stack.pop_back();
      const auto& node = nodes[k];
      if (node.is_leaf()) {
        out[static_cast<std::size_t>(node.leaf_id)] = std::move(region);
        continue;
      }
      const auto& rule = node.rule;
      LeafRegion left = region, right = std::move(region);
      if (rule.is_categorical()) {
        for (std::size_t l = 0; l < rule.left_levels.size(); ++l) {
          if (rule.left_levels[l]) right.admissible[rule.feature][l] = 0;
          else left.admissible[rule.feature][l] = 0;
        }
      } else {
        left.upper[rule.feature] = std::min(left.upper[rule.feature], rule.threshold);
        right.lower[rule.feature] = std::max(right.lower[rule.feature], rule.threshold);
      }
      stack.emplace_back(static_cast<std::size_t>(node.right), std::move(right));
      stack.emplace_back(static_cast<std::size_t>(node.left), std::move(left));
    }
  }
  return out;
}

// ---- serialization --------------------------------------------------------

namespace {
constexpr int kFormatVersion = 1;
}

std::string serialize(const Forest& forest) {
  using nlohmann::json;
  json j;
  j["format"] = "carfi-forest";
  j["version"] = kFormatVersion;
  j["task"] = forest.task() == Task::Classification ? "classification" : "regression";
  j["num_classes"] = forest.num_classes();
  const auto& p = forest.params();
  j["params"] = {{"num_trees", p.num_trees},
                 {"min_node_size", p.min_node_size},
                 {"mtry", p.mtry ? json(*p.mtry) : json(nullptr)},
                 {"bootstrap", p.bootstrap}};
  json features = json::array();
  for (const auto& c : forest.features().columns()) features.push_back({{"name", c.name}, {"levels", c.kind.levels()}});
  j["features"] = std::move(features);
  json trees = json::array();
  for (const auto& t : forest.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) {
      json jn;
      if (n.is_leaf()) {
        jn = {{"rows", n.rows}, {"value", n.value}};
      } else {
        jn = {{"left", n.left}, {"right", n.right}, {"feature", n.rule.feature}};
        if (n.rule.is_categorical()) jn["left_levels"] = n.rule.left_levels;
        else jn["threshold"] = n.rule.threshold;
      }
      nodes.push_back(std::move(jn));
    }
    trees.push_back({{"oob", t.oob_rows()}, {"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

Forest deserialize_forest(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed forest: ") + e.what());
  }
  if (j.value("format", "") != "carfi-forest") throw InputError("not a carfi forest");
  if (j.value("version", 0) != kFormatVersion) throw InputError("unsupported forest format version");
  try {
    ForestParams params;
    params.num_trees = j["params"]["num_trees"];
    params.min_node_size = j["params"]["min_node_size"];
    if (!j["params"]["mtry"].is_null()) params.mtry = j["params"]["mtry"].get<int>();
    params.bootstrap = j["params"]["bootstrap"];
    std::vector<Column> cols;
    for (const auto& f : j["features"]) {
      auto levels = f["levels"].get<std::vector<std::string>>();
      cols.push_back({f["name"], levels.empty() ? FeatureKind::continuous() : FeatureKind::categorical(levels)});
    }
    std::vector<Tree> trees;
    for (const auto& jt : j["trees"]) {
      std::vector<TreeNode> nodes;
      for (const auto& jn : jt["nodes"]) {
        TreeNode n;
        if (jn.contains("rows")) {
          n.rows = jn["rows"].get<std::vector<std::uint32_t>>();
          n.value = jn["value"].get<std::vector<double>>();
        } else {
          n.left = jn["left"];
          n.right = jn["right"];
          n.rule.feature = jn["feature"];
          if (jn.contains("left_levels")) n.rule.left_levels = jn["left_levels"].get<std::vector<std::uint8_t>>();
          else n.rule.threshold = jn["threshold"];
        }
        nodes.push_back(std::move(n));
      }
      trees.emplace_back(std::move(nodes), jt["oob"].get<std::vector<std::uint32_t>>());
    }
    const Task task = j["task"] == "classification" ? Task::Classification : Task::Regression;
    return Forest(Schema(std::move(cols)), task, j["num_classes"], params, std::move(trees));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed forest: ") + e.what());
  }
}

}  // namespace carfi
