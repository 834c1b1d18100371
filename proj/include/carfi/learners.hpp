#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "carfi/common.hpp"
#include "carfi/forest.hpp"
#include "carfi/tabular.hpp"

namespace carfi {

enum class LossFn { MSE, RMSE };

LossFn parse_loss(const std::string& name);
std::string to_string(LossFn loss);

// Prediction model over a fixed feature schema (target excluded).
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual const Schema& features() const = 0;
  virtual double predict_row(std::span<const double> row) const = 0;

  std::vector<double> predict(const Dataset& rows) const;
};

class LinearModel final : public Learner {
 public:
  LinearModel(Schema features, double intercept, std::vector<double> coefficients);

  std::string name() const override { return "lm"; }
  const Schema& features() const override { return features_; }
  double predict_row(std::span<const double> row) const override;

  double intercept() const { return intercept_; }
  // One-hot layout with the first level of every categorical feature dropped.
  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  Schema features_;
  double intercept_;
  std::vector<double> coefficients_;
  std::vector<std::size_t> offset_;  // first coefficient of each feature
};

class ForestRegressor final : public Learner {
 public:
  explicit ForestRegressor(Forest forest) : forest_(std::move(forest)) {}

  std::string name() const override { return "rf"; }
  const Schema& features() const override { return forest_.features(); }
  double predict_row(std::span<const double> row) const override { return forest_.predict_row(row); }
  const Forest& forest() const { return forest_; }

 private:
  Forest forest_;
};

// `train` carries a continuous target column.
std::unique_ptr<LinearModel> fit_lm(const Dataset& train);
std::unique_ptr<ForestRegressor> fit_rf(const Dataset& train, const ForestParams& params, std::uint64_t seed);
std::unique_ptr<Learner> fit_learner(const std::string& kind, const Dataset& train, const ForestParams& params,
                                     std::uint64_t seed);

// Per-instance squared errors; both loss modes use them for the test.
std::vector<double> instance_losses(std::span<const double> predictions, std::span<const double> truths);
// MSE: mean of the squared errors. RMSE: its square root.
double aggregate_loss(std::span<const double> squared_errors, LossFn loss);

}  // namespace carfi
