#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "carfi/learners.hpp"
#include "carfi/simgen.hpp"
#include "helpers.hpp"

namespace carfi {
namespace {

TEST(FitLm, ExactLine) {
  std::vector<double> x(20), y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x[i] = static_cast<double>(i) * 0.37 - 2;
    y[i] = 2 * x[i] + 1;
  }
  const auto lm = fit_lm(Dataset(testing::continuous_schema(1, "y"), {x, y}));
  EXPECT_NEAR(lm->coefficients()[0], 2.0, 1e-10);
  EXPECT_NEAR(lm->intercept(), 1.0, 1e-10);
}

TEST(FitLm, IndependentTargetHasFlatSlope) {
  Rng rng(4);
  std::vector<double> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = standard_normal(rng);
    y[i] = standard_normal(rng);
  }
  const auto lm = fit_lm(Dataset(testing::continuous_schema(1, "y"), {x, y}));
  EXPECT_NEAR(lm->coefficients()[0], 0.0, 0.05);
}

TEST(FitLm, RankDeficiency) {
  const std::vector<double> a{1, 2, 3, 4, 5}, y{1, 3, 2, 5, 4};
  const Dataset d(testing::continuous_schema(2, "y"), {a, a, y});
  try {
    fit_lm(d);
    FAIL() << "expected a rank-deficiency error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("rank"), std::string::npos);
  }
  EXPECT_THROW(fit_lm(Dataset(testing::continuous_schema(2, "y"), {{1, 2}, {3, 1}, {2, 2}})), InputError);
}

// One-hot fit compared with the normal equations solved independently.
TEST(FitLm, MatchesNormalEquationsWithCategoricals) {
  MixedDagParams params;
  const auto d = gen_mixed_dag(800, params, 2);
  const auto lm = fit_lm(d);
  const auto [x, y] = d.split_target();
  const auto enc = encode(x, Encoding::OneHot);
  const auto k = enc.names.size();
  Eigen::MatrixXd a(enc.rows, k + 1);
  Eigen::VectorXd b(enc.rows);
  for (std::size_t i = 0; i < enc.rows; ++i) {
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = enc.values[i * k + j];
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Eigen::VectorXd beta = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  EXPECT_NEAR(lm->intercept(), beta(0), 1e-8);
  for (std::size_t j = 0; j < k; ++j) EXPECT_NEAR(lm->coefficients()[j], beta(static_cast<Eigen::Index>(j + 1)), 1e-8);
  const auto pred = lm->predict(x);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(pred[i], (a.row(static_cast<Eigen::Index>(i)) * beta)(0), 1e-8);
}

TEST(FitLm, RejectsCategoricalOrMissingTarget) {
  const Schema cat({{"x", FeatureKind::continuous()}, {"y", FeatureKind::categorical({"a", "b"})}}, "y");
  EXPECT_THROW(fit_lm(Dataset(cat, {{1, 2, 3}, {0, 1, 0}})), InputError);
  EXPECT_THROW(fit_lm(Dataset(testing::continuous_schema(2), {{1, 2, 3}, {0, 1, 0}})), InputError);
}

TEST(FitRf, DeterministicAndParallelPredictMatchesRows) {
  const auto d = gen_toeplitz(300, 4, default_betas(4), Setting::Linear, 1);
  ForestParams params;
  params.num_trees = 20;
  params.min_node_size = 5;
  const auto a = fit_rf(d, params, 3);
  const auto b = fit_rf(d, params, 3);
  const auto x = d.split_target().first;
  const auto pa = a->predict(x);
  EXPECT_EQ(pa, b->predict(x));
  for (std::size_t i = 0; i < x.num_rows(); ++i) EXPECT_EQ(pa[i], a->predict_row(x.row(i)));
  EXPECT_THROW(fit_learner("svm", d, params, 1), InputError);
}

TEST(Losses, SquaredErrorsAndAggregates) {
  const std::vector<double> y{1.0, 2.0};
  EXPECT_EQ(instance_losses(y, y), (std::vector<double>{0.0, 0.0}));
  const std::vector<double> pred{2.0, 0.0};
  const auto l = instance_losses(pred, y);
  EXPECT_EQ(l, (std::vector<double>{1.0, 4.0}));
  EXPECT_EQ(aggregate_loss(l, LossFn::MSE), 2.5);
  EXPECT_EQ(aggregate_loss(l, LossFn::RMSE), std::sqrt(2.5));
  EXPECT_EQ(parse_loss("rmse"), LossFn::RMSE);
  EXPECT_THROW(parse_loss("mae"), InputError);
}

}  // namespace
}  // namespace carfi
