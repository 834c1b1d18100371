#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "carfi/importance.hpp"
#include "carfi/reference.hpp"
#include "carfi/simgen.hpp"
#include "helpers.hpp"

namespace carfi {
namespace {

struct Fixture {
  Dataset train;
  Dataset test;
  std::unique_ptr<Learner> learner;
  DensityModel model;
};

Fixture mixed_fixture(std::size_t n, const std::string& learner, std::uint64_t seed) {
  MixedDagParams params;
  auto [train, test] = split(gen_mixed_dag(n, params, seed), 0.5, seed + 1);
  ForestParams fp;
  fp.num_trees = 30;
  fp.min_node_size = 5;
  auto l = fit_learner(learner, train, fp, seed + 2);
  ArfConfig cfg;
  cfg.seed = seed + 3;
  auto model = forde(fit_arf(train.split_target().first, cfg));
  return Fixture{std::move(train), std::move(test), std::move(l), std::move(model)};
}

void expect_same(const ImportanceReport& a, const ImportanceReport& b) {
  EXPECT_EQ(a.deltas, b.deltas);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.test.t, b.test.t);
  EXPECT_EQ(a.test.p_value, b.test.p_value);
  EXPECT_EQ(a.conditioning, b.conditioning);
  EXPECT_EQ(a.extrapolated, b.extrapolated);
  EXPECT_EQ(a.base_loss, b.base_loss);
  EXPECT_EQ(a.replaced_loss, b.replaced_loss);
}

std::vector<ImportanceQuery> assorted_queries() {
  using V = std::vector<std::size_t>;
  return {
      {V{0}, std::nullopt, 1, LossFn::MSE, 1},
      {V{1}, V{}, 3, LossFn::MSE, 2},
      {V{2}, V{1}, 2, LossFn::RMSE, 3},
      {V{3}, V{0, 2}, 1, LossFn::MSE, 4},
      {V{0, 3}, std::nullopt, 4, LossFn::MSE, 5},
      {V{1}, std::nullopt, 2, LossFn::MSE, 6},
      {V{3, 1}, V{0}, 1, LossFn::MSE, 7},
  };
}

TEST(Carfi, KernelMatchesSerialReference) {
  const auto f = mixed_fixture(600, "rf", 10);
  const auto queries = assorted_queries();
  const auto fast = carfi(f.test, *f.learner, f.model, queries);
  ASSERT_EQ(fast.size(), queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    SCOPED_TRACE(q);
    expect_same(fast[q], reference::carfi(f.test, *f.learner, f.model, queries[q]));
    expect_same(fast[q], carfi(f.test, *f.learner, f.model, queries[q]));
  }
}

TEST(Carfi, KernelMatchesReferenceUnderExtrapolation) {
  // Test rows far outside the training range force the fallback path.
  const auto f = mixed_fixture(400, "lm", 20);
  auto cols = std::vector<std::vector<double>>();
  for (std::size_t j = 0; j < f.test.num_cols(); ++j) cols.emplace_back(f.test.column(j).begin(), f.test.column(j).end());
  for (std::size_t i = 0; i < 20; ++i) cols[1][i] = 40.0 + static_cast<double>(i);
  const Dataset shifted(f.test.schema(), cols);
  const ImportanceQuery q{{2}, std::nullopt, 3, LossFn::MSE, 9};
  const auto fast = carfi(shifted, *f.learner, f.model, q);
  EXPECT_GE(fast.extrapolated, 20u);
  expect_same(fast, reference::carfi(shifted, *f.learner, f.model, q));
}

TEST(Carfi, IndependentOfThreadCount) {
  const auto f = mixed_fixture(500, "rf", 30);
  const auto queries = assorted_queries();
  const auto a = carfi(f.test, *f.learner, f.model, queries);
  set_num_threads(1);
  const auto b = carfi(f.test, *f.learner, f.model, queries);
  set_num_threads(max_threads());
  for (std::size_t q = 0; q < queries.size(); ++q) expect_same(a[q], b[q]);
}

TEST(Carfi, EstimateIsMeanOfDeltas) {
  const auto f = mixed_fixture(400, "lm", 40);
  for (const auto& r : carfi(f.test, *f.learner, f.model, assorted_queries())) {
    const double m = std::accumulate(r.deltas.begin(), r.deltas.end(), 0.0) / static_cast<double>(r.deltas.size());
    EXPECT_NEAR(r.estimate, m, 1e-12);
    EXPECT_EQ(r.deltas.size(), f.test.num_rows());
  }
}

// Per-instance streams are keyed by content, so reordering the test set
// reorders the deltas and nothing else.
TEST(Carfi, InvariantToTestRowOrder) {
  const auto f = mixed_fixture(400, "rf", 50);
  std::vector<std::size_t> order(f.test.num_rows());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::swap(order[3], order[40]);
  const auto shuffled = f.test.select_rows(order);
  const ImportanceQuery q{{1}, std::nullopt, 2, LossFn::MSE, 3};
  const auto a = carfi(f.test, *f.learner, f.model, q);
  const auto b = carfi(shuffled, *f.learner, f.model, q);
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(b.deltas[i], a.deltas[order[i]]);
  EXPECT_NEAR(a.estimate, b.estimate, 1e-12);
}

TEST(Carfi, IgnoredFeatureHasZeroImportance) {
  const auto f = mixed_fixture(400, "lm", 60);
  const auto* lm = dynamic_cast<const LinearModel*>(f.learner.get());
  ASSERT_NE(lm, nullptr);
  auto coef = lm->coefficients();
  const auto x = f.train.split_target().first;
  // x2 is the only continuous feature without dummies ahead of it: index 9.
  ASSERT_EQ(coef.size(), 9u + 1u + 9u + 1u);
  coef[9] = 0.0;
  const LinearModel ignoring(x.schema(), lm->intercept(), coef);
  const auto r = carfi(f.test, ignoring, f.model, ImportanceQuery{{1}, std::nullopt, 5, LossFn::MSE, 1});
  for (double d : r.deltas) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(r.estimate, 0.0);
  EXPECT_EQ(r.test.p_value, 0.5);
  const auto p = pfi(f.test, ignoring, {1}, 5, LossFn::MSE, 1);
  for (double d : p.deltas) EXPECT_EQ(d, 0.0);
}

// A model whose only leaf puts all mass on one level replaces the feature by
// that level: the deltas are the fixed-substitution loss differences.
TEST(Carfi, FixedSubstitutionByHand) {
  const Schema s({{"c", FeatureKind::categorical({"a", "b", "c"})}, {"x", FeatureKind::continuous()}});
  LeafDensity leaf;
  leaf.weight = 1.0;
  leaf.features = {FeatureDensity::categorical({0.0, 0.0, 1.0}), FeatureDensity::gaussian(TruncatedNormal(0, 1))};
  const DensityModel model(s, {leaf});
  const LinearModel lm(s, 0.5, {1.0, -2.0, 3.0});
  const Schema with_y({s.column(0), s.column(1), {"y", FeatureKind::continuous()}}, "y");
  const Dataset test(with_y, {{0, 1, 2, 1}, {0.5, -1.0, 2.0, 0.0}, {1.0, 0.0, -3.0, 2.0}});
  const auto r = carfi(test, lm, model, ImportanceQuery{{0}, std::nullopt, 3, LossFn::MSE, 4});
  for (std::size_t i = 0; i < 4; ++i) {
    const double x = test.at(i, 1), y = test.at(i, 2);
    const double level_effect[] = {0.0, 1.0, -2.0};
    const double base = 0.5 + level_effect[static_cast<std::size_t>(test.at(i, 0))] + 3.0 * x - y;
    const double replaced = 0.5 - 2.0 + 3.0 * x - y;
    EXPECT_NEAR(r.deltas[i], replaced * replaced - base * base, 1e-12);
  }
}

TEST(Carfi, MoreReplicatesReduceVariance) {
  const auto f = mixed_fixture(600, "lm", 70);
  std::vector<double> r1, r20;
  for (std::uint64_t s = 0; s < 50; ++s) {
    r1.push_back(carfi(f.test, *f.learner, f.model, ImportanceQuery{{3}, std::nullopt, 1, LossFn::MSE, s}).estimate);
    r20.push_back(carfi(f.test, *f.learner, f.model, ImportanceQuery{{3}, std::nullopt, 20, LossFn::MSE, s + 1000}).estimate);
  }
  EXPECT_LT(testing::variance(r20), testing::variance(r1));
  // Same expectation: the difference of means is within a few standard errors.
  const double se = std::sqrt(testing::variance(r1) / 50 + testing::variance(r20) / 50);
  EXPECT_LT(std::fabs(testing::mean(r1) - testing::mean(r20)), 4 * se);
}

TEST(Carfi, ProfileMatchesIndividualQueries) {
  const auto f = mixed_fixture(400, "rf", 80);
  const std::vector<std::vector<std::size_t>> sets{{}, {0}, {1, 3}};
  const auto prof = importance_profile(f.test, *f.learner, f.model, {2}, sets, 2, LossFn::MSE, 5);
  ASSERT_EQ(prof.size(), 3u);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    expect_same(prof[k], carfi(f.test, *f.learner, f.model, ImportanceQuery{{2}, sets[k], 2, LossFn::MSE, 5}));
  }
}

TEST(Carfi, RmseLoss) {
  const auto f = mixed_fixture(400, "lm", 90);
  const auto mse = carfi(f.test, *f.learner, f.model, ImportanceQuery{{3}, std::nullopt, 1, LossFn::MSE, 1});
  const auto rmse = carfi(f.test, *f.learner, f.model, ImportanceQuery{{3}, std::nullopt, 1, LossFn::RMSE, 1});
  EXPECT_EQ(mse.deltas, rmse.deltas);
  EXPECT_NEAR(rmse.base_loss, std::sqrt(mse.base_loss), 1e-12);
  EXPECT_NEAR(rmse.replaced_loss, std::sqrt(mse.replaced_loss), 1e-12);
}

TEST(Carfi, QueryValidation) {
  const auto f = mixed_fixture(300, "lm", 100);
  using V = std::vector<std::size_t>;
  EXPECT_THROW(carfi(f.test, *f.learner, f.model, ImportanceQuery{V{}, std::nullopt, 1, LossFn::MSE, 1}), InputError);
  EXPECT_THROW(carfi(f.test, *f.learner, f.model, ImportanceQuery{V{1}, V{1, 2}, 1, LossFn::MSE, 1}), InputError);
  EXPECT_THROW(carfi(f.test, *f.learner, f.model, ImportanceQuery{V{1}, std::nullopt, 0, LossFn::MSE, 1}), InputError);
  EXPECT_THROW(carfi(f.test, *f.learner, f.model, ImportanceQuery{V{4}, std::nullopt, 1, LossFn::MSE, 1}), InputError);
  // Model fit on different columns.
  ArfConfig cfg;
  const auto other = forde(fit_arf(testing::gaussian_pair(300, 0.5, 1), cfg));
  EXPECT_THROW(carfi(f.test, *f.learner, other, ImportanceQuery{V{1}, std::nullopt, 1, LossFn::MSE, 1}), InputError);
}

TEST(Pfi, ConstantFeatureIsExactlyZero) {
  Rng rng(1);
  std::vector<double> a(200), b(200, 3.0), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    a[i] = standard_normal(rng);
    y[i] = a[i] + standard_normal(rng);
  }
  const Dataset d(testing::continuous_schema(2, "y"), {a, b, y});
  const LinearModel lm(d.split_target().first.schema(), 0.1, {1.0, 2.0});
  const auto r = pfi(d, lm, {1}, 10, LossFn::MSE, 2);
  for (double v : r.deltas) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.estimate, 0.0);
}

TEST(Pfi, LinearModelAnalyticExpectation) {
  // E[PFI_j] = 2 b_j^2 Var(X_j) for a linear model.
  const auto d = gen_toeplitz(20000, 3, {0.0, 1.5, 0.0}, Setting::Linear, 4);
  const LinearModel lm(d.split_target().first.schema(), 0.0, {0.0, 1.5, 0.0});
  const auto r = pfi(d, lm, {1}, 5, LossFn::MSE, 5);
  EXPECT_NEAR(r.estimate, 2 * 1.5 * 1.5 * 1.0, 0.05 * 4.5);
}

TEST(Pfi, JointPermutationKeepsRowsTogether) {
  // y depends on x1 * x2; permuting both jointly keeps the product paired.
  Rng rng(3);
  std::vector<double> a(100), b(100), y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    a[i] = standard_normal(rng);
    b[i] = a[i];
    y[i] = 0.0;
  }
  const Dataset d(testing::continuous_schema(2, "y"), {a, b, y});
  const LinearModel diff(d.split_target().first.schema(), 0.0, {1.0, -1.0});
  const auto r = pfi(d, diff, {0, 1}, 3, LossFn::MSE, 1);
  for (double v : r.deltas) EXPECT_EQ(v, 0.0);
  EXPECT_GT(pfi(d, diff, {0}, 3, LossFn::MSE, 1).estimate, 0.5);
}

TEST(DescribeColumns, JoinsNames) {
  const auto s = testing::continuous_schema(3);
  EXPECT_EQ(describe_columns(s, std::vector<std::size_t>{}), "none");
  EXPECT_EQ(describe_columns(s, std::vector<std::size_t>{0, 2}), "x1+x3");
}

}  // namespace
}  // namespace carfi
