#include "carfi/learners.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace carfi {

LossFn parse_loss(const std::string& name) {
  if (name == "mse") return LossFn::MSE;
  if (name == "rmse") return LossFn::RMSE;
  throw InputError("unknown loss '" + name + "' (expected mse or rmse)");
}

std::string to_string(LossFn loss) { return loss == LossFn::MSE ? "mse" : "rmse"; }

std::vector<double> Learner::predict(const Dataset& rows) const {
  if (!rows.schema().same_columns(features())) throw InputError("rows do not match the learner's features");
  std::vector<double> out(rows.num_rows());
#pragma omp parallel
  {
    std::vector<double> row(rows.num_cols());
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < rows.num_rows(); ++i) {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = rows.at(i, j);
      out[i] = predict_row(row);
    }
  }
  return out;
}

LinearModel::LinearModel(Schema features, double intercept, std::vector<double> coefficients)
    : features_(std::move(features)), intercept_(intercept), coefficients_(std::move(coefficients)) {
  std::size_t pos = 0;
  for (const auto& c : features_.columns()) {
    offset_.push_back(pos);
    pos += c.kind.is_categorical() ? c.kind.num_levels() - 1 : 1;
  }
  if (pos != coefficients_.size()) throw InputError("coefficient count does not match the encoded features");
}

double LinearModel::predict_row(std::span<const double> row) const {
  double y = intercept_;
  for (std::size_t j = 0; j < offset_.size(); ++j) {
    if (features_.column(j).kind.is_categorical()) {
      const auto k = static_cast<std::size_t>(row[j]);
      if (k > 0) y += coefficients_[offset_[j] + k - 1];
    } else {
      y += coefficients_[offset_[j]] * row[j];
    }
  }
  return y;
}

namespace {

std::pair<Dataset, std::vector<double>> regression_parts(const Dataset& train) {
  const auto& target = train.schema().target();
  if (!target) throw InputError("training data has no target column");
  if (train.schema().column(train.schema().index_of(*target)).kind.is_categorical()) {
    throw InputError("target '" + *target + "' must be continuous");
  }
  return train.split_target();
}

}  // namespace

std::unique_ptr<LinearModel> fit_lm(const Dataset& train) {
  auto [x, y] = regression_parts(train);
  const auto enc = encode(x, Encoding::OneHot);
  const std::size_t n = enc.rows, k = enc.names.size() + 1;
  if (n <= k) throw InputError("linear model needs more rows than encoded columns");
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (std::size_t c = 1; c < k; ++c) a(i, c) = enc.values[i * (k - 1) + c - 1];
    b(i) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (static_cast<std::size_t>(qr.rank()) < k) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (std::size_t c = static_cast<std::size_t>(qr.rank()); c < k; ++c) {
      const auto idx = static_cast<std::size_t>(perm(static_cast<Eigen::Index>(c)));
      cols += (cols.empty() ? "" : ", ") + (idx == 0 ? std::string("(intercept)") : enc.names[idx - 1]);
    }
    throw InputError("rank-deficient design; linearly dependent columns: " + cols);
  }
  const Eigen::VectorXd beta = qr.solve(b);
  std::vector<double> coef(k - 1);
  for (std::size_t c = 1; c < k; ++c) coef[c - 1] = beta(static_cast<Eigen::Index>(c));
  return std::make_unique<LinearModel>(x.schema(), beta(0), std::move(coef));
}

std::unique_ptr<ForestRegressor> fit_rf(const Dataset& train, const ForestParams& params, std::uint64_t seed) {
  auto [x, y] = regression_parts(train);
  return std::make_unique<ForestRegressor>(fit_forest(x, y, Task::Regression, params, seed));
}

std::unique_ptr<Learner> fit_learner(const std::string& kind, const Dataset& train, const ForestParams& params,
                                     std::uint64_t seed) {
  if (kind == "lm") return fit_lm(train);
  if (kind == "rf") return fit_rf(train, params, seed);
  throw InputError("unknown learner '" + kind + "' (expected lm or rf)");
}

std::vector<double> instance_losses(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw InputError("prediction and truth lengths differ");
  std::vector<double> out(predictions.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double e = predictions[i] - truths[i];
    out[i] = e * e;
  }
  return out;
}

double aggregate_loss(std::span<const double> squared_errors, LossFn loss) {
  if (squared_errors.empty()) throw InputError("no losses to aggregate");
  double s = 0.0;
  for (double v : squared_errors) s += v;
  const double mse = s / static_cast<double>(squared_errors.size());
  return loss == LossFn::MSE ? mse : std::sqrt(mse);
}

}  // namespace carfi
