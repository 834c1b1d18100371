#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carfi/tabular.hpp"

namespace carfi {

enum class Task { Classification, Regression };

struct ForestParams {
  int num_trees = 100;
  int min_node_size = 20;
  std::optional<int> mtry;  // ceil(sqrt(p)) for classification, ceil(p/3) for regression
  bool bootstrap = true;
};

// Continuous: left iff value <= threshold. Categorical: left iff the level is
// in `left_levels` (a mask over the feature's levels).
struct SplitRule {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::vector<std::uint8_t> left_levels;

  bool is_categorical() const { return !left_levels.empty(); }
  bool goes_left(double v) const {
    return is_categorical() ? left_levels[static_cast<std::size_t>(v)] != 0 : v <= threshold;
  }
  friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

struct TreeNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  SplitRule rule;
  std::int32_t leaf_id = -1;          // forest-wide leaf id, -1 for internal nodes
  std::vector<std::uint32_t> rows;    // training sample ids reaching the leaf (bootstrap duplicates kept)
  std::vector<double> value;          // regression: {mean}; classification: class frequencies

  bool is_leaf() const { return left < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  Tree(std::vector<TreeNode> nodes, std::vector<std::uint32_t> oob_rows)
      : nodes_(std::move(nodes)), oob_rows_(std::move(oob_rows)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& oob_rows() const { return oob_rows_; }

  // Index (into nodes()) of the leaf a row is routed to.
  std::size_t leaf_node(std::span<const double> row) const {
    std::size_t k = 0;
    while (!nodes_[k].is_leaf()) {
      const auto& n = nodes_[k];
      k = static_cast<std::size_t>(n.rule.goes_left(row[n.rule.feature]) ? n.left : n.right);
    }
    return k;
  }
  const TreeNode& leaf(std::span<const double> row) const { return nodes_[leaf_node(row)]; }

  std::size_t num_leaves() const;
  void assign_leaf_ids(std::int32_t first);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> oob_rows_;
};

// Hyperrectangle of a leaf: (lower, upper] per continuous feature and the
// admissible level mask per categorical feature.
struct LeafRegion {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::vector<std::uint8_t>> admissible;  // empty for continuous features

  bool contains(std::span<const double> row) const;
};

class Forest {
 public:
  Forest(Schema features, Task task, std::size_t num_classes, ForestParams params, std::vector<Tree> trees);

  const Schema& features() const { return features_; }
  Task task() const { return task_; }
  std::size_t num_classes() const { return num_classes_; }
  const ForestParams& params() const { return params_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t num_trees() const { return trees_.size(); }
  std::size_t num_leaves() const { return num_leaves_; }

  // Regression: mean of per-tree leaf means. Classification: majority vote
  // (ties go to the lowest class index).
  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Dataset& rows) const;
  // Vote fractions per class (classification only).
  std::vector<double> predict_proba_row(std::span<const double> row) const;

  // Forest-wide leaf id for every (tree, row).
  std::vector<std::vector<std::int32_t>> apply(const Dataset& rows) const;

  friend bool operator==(const Forest& a, const Forest& b) {
    return a.features_ == b.features_ && a.task_ == b.task_ && a.num_classes_ == b.num_classes_ &&
           a.trees_ == b.trees_;
  }

 private:
  // Compact copy of every tree for fast routing. Internal nodes: feature >= 0,
  // children at next and next + 1, split is the threshold or, for categorical
  // rules, mask >= 0 indexes masks_. Leaves: feature = -1, next = forest-wide
  // leaf id, split = regression value.
  struct FlatNode {
    std::int32_t feature;
    std::int32_t next;
    std::int32_t mask;
    double split;
  };

  const FlatNode& flat_leaf(std::size_t tree, std::span<const double> row) const {
    const FlatNode* n = &flat_[roots_[tree]];
    while (n->feature >= 0) {
      const double v = row[static_cast<std::size_t>(n->feature)];
      const bool left = n->mask >= 0 ? masks_[static_cast<std::size_t>(n->mask) + static_cast<std::size_t>(v)] != 0
                                     : v <= n->split;
      n = &flat_[roots_[tree] + static_cast<std::size_t>(n->next + (left ? 0 : 1))];
    }
    return *n;
  }
  void check_rows(const Dataset& rows) const;

  Schema features_;
  Task task_;
  std::size_t num_classes_;
  ForestParams params_;
  std::vector<Tree> trees_;
  std::size_t num_leaves_ = 0;
  std::vector<FlatNode> flat_;
  std::vector<std::size_t> roots_;
  std::vector<std::uint8_t> masks_;
};

// Grows `params.num_trees` CART trees in parallel. Per-tree seeds derive from
// `seed`, so the result does not depend on the thread count. For
// classification, y holds class indices in [0, num_classes).
Forest fit_forest(const Dataset& features, std::span<const double> y, Task task, const ForestParams& params,
                  std::uint64_t seed, std::size_t num_classes = 0);

// Convenience overload: `target` names a column of `data`; it must be
// categorical for classification and continuous for regression.
Forest fit_forest(const Dataset& data, const std::string& target, Task task, const ForestParams& params,
                  std::uint64_t seed);

// Fraction of rows whose out-of-bag majority vote equals y. Rows never
// out-of-bag are excluded.
double oob_accuracy(const Forest& forest, const Dataset& features, std::span<const double> y);

// Indexed by forest-wide leaf id.
std::vector<LeafRegion> leaf_regions(const Forest& forest);

// Versioned JSON structure; round-trips losslessly.
std::string serialize(const Forest& forest);
Forest deserialize_forest(std::string_view text);

namespace detail {

// Inputs shared by every node of one tree fit.
struct GrowData {
  std::vector<std::span<const double>> columns;
  std::vector<std::size_t> num_levels;  // 0 for continuous features
  std::span<const double> y;
  Task task = Task::Regression;
  std::size_t num_classes = 0;
  std::size_t min_node_size = 1;
};

struct SplitCandidate {
  bool found = false;
  SplitRule rule;
  double gain = 0.0;  // impurity decrease, weighted by node size
};

using SplitFinder = SplitCandidate (*)(const GrowData&, std::span<const std::uint32_t>, std::size_t feature);

// Sort-and-scan split search for one feature.
SplitCandidate best_split(const GrowData& data, std::span<const std::uint32_t> rows, std::size_t feature);

Tree grow_tree(const GrowData& data, const ForestParams& params, std::size_t mtry, std::uint64_t seed,
               SplitFinder finder);

GrowData make_grow_data(const Dataset& features, std::span<const double> y, Task task, std::size_t num_classes,
                        const ForestParams& params);
std::size_t resolve_mtry(const ForestParams& params, Task task, std::size_t p);

}  // namespace detail

}  // namespace carfi
