#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "carfi/forest.hpp"
#include "carfi/tabular.hpp"

namespace carfi {

struct ArfConfig {
  int min_node_size = 20;
  int num_trees = 30;
  int max_iterations = 10;
  double delta = 0.02;  // converged once OOB accuracy <= 0.5 + delta
  std::optional<int> mtry;
  std::uint64_t seed = 42;

  void validate() const;
};

// Adversarially trained discriminator whose leaves approximate regions of
// within-leaf feature independence.
class ArfModel {
 public:
  ArfModel(Forest forest, std::vector<double> accuracy_trace, std::shared_ptr<const Dataset> data, ArfConfig config)
      : forest_(std::move(forest)),
        trace_(std::move(accuracy_trace)),
        data_(std::move(data)),
        config_(std::move(config)) {}

  const Forest& forest() const { return forest_; }
  // Number of generator/discriminator rounds after the initial fit.
  int iterations() const { return static_cast<int>(trace_.size()) - 1; }
  const std::vector<double>& accuracy_trace() const { return trace_; }
  const Dataset& data() const { return *data_; }
  const ArfConfig& config() const { return config_; }
  bool converged() const { return trace_.back() <= 0.5 + config_.delta; }

 private:
  Forest forest_;
  std::vector<double> trace_;
  std::shared_ptr<const Dataset> data_;
  ArfConfig config_;
};

// `features` must not carry a target column.
ArfModel fit_arf(const Dataset& features, const ArfConfig& config);

namespace detail {

// Training-time generator: per row, a uniform tree, a leaf drawn by the
// tree's real-data coverage, then each feature resampled independently from
// the real values in that leaf.
Dataset generate_from_leaves(const Forest& forest, const Dataset& real, std::size_t n, std::uint64_t seed);

}  // namespace detail

}  // namespace carfi
