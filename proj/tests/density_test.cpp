#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <set>

#include "carfi/density.hpp"
#include "carfi/simgen.hpp"
#include "helpers.hpp"

namespace carfi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Breakpoints around the mode so narrow leaf densities are resolved.
std::vector<double> breakpoints(const TruncatedNormal& g) {
  std::set<double> k{g.lower(), g.upper()};
  for (double z : {-8.0, -1.0, 0.0, 1.0, 8.0}) {
    const double v = g.mean() + z * g.sd();
    if (v > g.lower() && v < g.upper()) k.insert(v);
  }
  return {k.begin(), k.end()};
}

template <typename F>
double integrate_pieces(F f, const std::vector<double>& knots) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, knots[i], knots[i + 1], 8, 1e-10);
  }
  return total;
}

double integrate(const TruncatedNormal& g) {
  return integrate_pieces([&](double x) { return std::exp(g.log_pdf(x)); }, breakpoints(g));
}

// ARF wrapper around a hand-made forest, for exact control over leaves.
ArfModel manual_arf(Forest forest, const Dataset& data) {
  return ArfModel(std::move(forest), {0.5}, std::make_shared<const Dataset>(data), ArfConfig{});
}

Tree root_only() {
  std::vector<TreeNode> nodes(1);
  nodes[0].value = {0.5, 0.5};
  return Tree(nodes, {});
}

Dataset mixed_sample(std::size_t n, std::uint64_t seed) {
  MixedDagParams params;
  return gen_mixed_dag(n, params, seed).split_target().first;
}

DensityModel fitted_model(const Dataset& x, std::uint64_t seed, int min_node_size = 20) {
  ArfConfig cfg;
  cfg.seed = seed;
  cfg.min_node_size = min_node_size;
  return forde(fit_arf(x, cfg));
}

TEST(Forde, LeafInvariantsOnFittedModel) {
  const auto x = mixed_sample(1500, 1);
  const auto model = fitted_model(x, 2);
  double total = 0.0;
  std::set<std::size_t> ids;
  for (const auto& leaf : model.leaves()) {
    total += leaf.weight;
    EXPECT_TRUE(ids.insert(leaf.id).second);
    for (const auto& f : leaf.features) {
      if (f.is_categorical()) {
        double s = 0.0;
        for (double q : f.probs()) {
          EXPECT_GE(q, 0.0);
          s += q;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      } else {
        EXPECT_GT(f.gaussian().sd(), 0.0);
        EXPECT_LT(f.gaussian().lower(), f.gaussian().upper());
        EXPECT_NEAR(integrate(f.gaussian()), 1.0, 1e-4);
      }
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Forde, RootLeafRecoversGaussianMoments) {
  const std::size_t n = 100000;
  Rng rng(3);
  std::vector<double> v(n);
  for (auto& x : v) x = standard_normal(rng);
  const Dataset data(testing::continuous_schema(1), {v});
  ForestParams params;
  const Forest f(data.schema(), Task::Classification, 2, params, {root_only()});
  FordeOptions opts;
  opts.finite_bounds = FiniteBounds::None;
  const auto model = forde(manual_arf(f, data), opts);
  ASSERT_EQ(model.num_leaves(), 1u);
  EXPECT_EQ(model.weights()[0], 1.0);
  const auto& g = model.leaf(0).features[0].gaussian();
  EXPECT_NEAR(g.mean(), 0.0, 0.02);
  EXPECT_NEAR(g.sd(), 1.0, 0.02);
  EXPECT_TRUE(std::isinf(g.lower()) && std::isinf(g.upper()));
}

TEST(Forde, CategoricalFrequencies) {
  const Schema s({{"c", FeatureKind::categorical({"a", "b"})}});
  const Dataset data(s, {{0, 0, 1}});
  ForestParams params;
  const Forest f(s, Task::Classification, 2, params, {root_only()});
  FordeOptions opts;
  opts.epsilon = 0.0;
  const auto probs = forde(manual_arf(f, data), opts).leaf(0).features[0].probs();
  EXPECT_NEAR(probs[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(probs[1], 1.0 / 3.0, 1e-15);

  opts.epsilon = 1e-3;
  const auto smoothed = forde(manual_arf(f, data), opts).leaf(0).features[0].probs();
  EXPECT_NEAR(smoothed[0], 2.001 / 3.002, 1e-15);
}

TEST(Forde, LocalBoundsReplaceInfiniteOnes) {
  const Dataset data(testing::continuous_schema(1), {{-2.3, 0.0, 0.5, 1.0, 1.5, 3.0, 4.0}});
  std::vector<TreeNode> nodes(3);
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[0].rule = SplitRule{0, 1.0, {}};
  nodes[1].value = {0.5, 0.5};
  nodes[2].value = {0.5, 0.5};
  ForestParams params;
  const Forest f(data.schema(), Task::Classification, 2, params, {Tree(nodes, {})});
  const auto model = forde(manual_arf(f, data));
  ASSERT_EQ(model.num_leaves(), 2u);
  const auto& left = model.leaf(0).features[0].gaussian();
  EXPECT_EQ(left.lower(), -2.3);
  EXPECT_EQ(left.upper(), 1.0);
  const auto& right = model.leaf(1).features[0].gaussian();
  EXPECT_EQ(right.lower(), 1.0);
  EXPECT_EQ(right.upper(), 4.0);
  EXPECT_NEAR(model.weights()[0], 4.0 / 7.0, 1e-15);
}

LeafDensity gaussian_leaf(std::size_t id, double w, double mean, double sd, double lo = -kInf, double hi = kInf) {
  LeafDensity l;
  l.id = id;
  l.weight = w;
  l.features.push_back(FeatureDensity::gaussian(TruncatedNormal(mean, sd, lo, hi)));
  return l;
}

TEST(JointDensity, SingleAndTwoLeafArithmetic) {
  const auto s = testing::continuous_schema(1);
  const DensityModel one(s, {gaussian_leaf(0, 1.0, 0.0, 1.0)});
  EXPECT_NEAR(joint_density(one, std::vector<double>{0.0}), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-15);

  const DensityModel bounded(s, {gaussian_leaf(0, 1.0, 0.0, 1.0, -1.0, 1.0)});
  EXPECT_EQ(joint_density(bounded, std::vector<double>{1.5}), 0.0);

  const DensityModel two(s, {gaussian_leaf(0, 0.5, 0.0, 1.0), gaussian_leaf(1, 0.5, 2.0, 0.5)});
  for (double x : {-1.0, 0.3, 2.2}) {
    const double d1 = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    const double z = (x - 2.0) / 0.5;
    const double d2 = std::exp(-0.5 * z * z) / (0.5 * std::sqrt(2 * std::numbers::pi));
    EXPECT_NEAR(joint_density(two, std::vector<double>{x}), 0.5 * d1 + 0.5 * d2, 1e-14);
  }
}

TEST(JointDensity, IntegratesToOne) {
  const auto x = testing::gaussian_pair(600, 0.5, 2).select_cols(std::vector<std::size_t>{0});
  ArfConfig cfg;
  cfg.seed = 3;
  cfg.num_trees = 4;
  const auto model = forde(fit_arf(x, cfg));
  std::set<double> knots;
  for (const auto& l : model.leaves()) {
    for (double v : breakpoints(l.features[0].gaussian())) knots.insert(v);
  }
  const double total = integrate_pieces([&](double v) { return joint_density(model, std::vector<double>{v}); },
                                        std::vector<double>(knots.begin(), knots.end()));
  EXPECT_NEAR(total, 1.0, 1e-4);
}

LeafDensity categorical_leaf(std::size_t id, double w, std::vector<double> probs) {
  LeafDensity l;
  l.id = id;
  l.weight = w;
  l.features.push_back(FeatureDensity::categorical(std::move(probs)));
  return l;
}

TEST(Condition, HandComputedUpdates) {
  const Schema s({{"c", FeatureKind::categorical({"a", "b"})}});
  const DensityModel m1(s, {categorical_leaf(0, 0.5, {0.2, 0.8}), categorical_leaf(1, 0.5, {0.0, 1.0})});
  const auto w1 = condition(m1, Evidence(s, {{0, 0.0}}));
  EXPECT_EQ(w1.weights, (std::vector<double>{1.0, 0.0}));
  EXPECT_FALSE(w1.extrapolated);

  const DensityModel m2(s, {categorical_leaf(0, 0.25, {0.4, 0.6}), categorical_leaf(1, 0.75, {0.4, 0.6})});
  const auto w2 = condition(m2, Evidence(s, {{0, 0.0}}));
  EXPECT_NEAR(w2.weights[0], 0.25, 1e-15);
  EXPECT_NEAR(w2.weights[1], 0.75, 1e-15);

  const auto w3 = condition(m2, Evidence());
  EXPECT_TRUE(std::equal(w3.weights.begin(), w3.weights.end(), m2.weights().begin()));
}

TEST(Condition, WeightsSumToOneAndZeroWhereUnsupported) {
  const auto x = mixed_sample(1000, 5);
  const auto model = fitted_model(x, 6);
  const auto q = mixed_sample(50, 7);
  for (std::size_t i = 0; i < q.num_rows(); ++i) {
    const auto row = q.row(i);
    for (std::vector<std::size_t> c : {std::vector<std::size_t>{0}, {1, 2}, {0, 1, 3}, {3}}) {
      const auto e = Evidence::from_row(x.schema(), row, c);
      const auto w = condition(model, e);
      double s = 0.0;
      for (double v : w.weights) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
      if (w.extrapolated) continue;
      for (std::size_t l = 0; l < model.num_leaves(); ++l) {
        double ll = 0.0;
        for (auto j : c) ll += model.leaf(l).features[j].log_pdf(row[j]);
        if (ll == -kInf) EXPECT_EQ(w.weights[l], 0.0);
      }
    }
  }
}

TEST(Condition, SequentialUpdatesCommute) {
  const auto x = mixed_sample(1000, 8);
  const auto model = fitted_model(x, 9);
  const auto q = mixed_sample(30, 10);
  for (std::size_t i = 0; i < q.num_rows(); ++i) {
    const auto row = q.row(i);
    const auto a = Evidence::from_row(x.schema(), row, std::vector<std::size_t>{1});
    const auto b = Evidence::from_row(x.schema(), row, std::vector<std::size_t>{3});
    const auto joint = condition(model, a.merged(b));
    if (joint.extrapolated) continue;
    const auto ab = condition(model, condition(model, a), b);
    const auto ba = condition(model, condition(model, b), a);
    for (std::size_t l = 0; l < model.num_leaves(); ++l) {
      EXPECT_NEAR(ab.weights[l], joint.weights[l], 1e-12);
      EXPECT_NEAR(ba.weights[l], joint.weights[l], 1e-12);
    }
    EXPECT_EQ(ab.evidence.size(), 2u);
  }
}

TEST(Condition, FallbackWhenNoLeafSupportsEvidence) {
  const auto s = testing::continuous_schema(1);
  std::vector<LeafDensity> leaves;
  for (std::size_t l = 0; l < 8; ++l) {
    const double c = static_cast<double>(l);
    leaves.push_back(gaussian_leaf(l, 1.0, c, 0.3, c - 0.5, c + 0.5));
  }
  const DensityModel m(s, leaves);
  const auto w = condition(m, Evidence(s, {{0, 20.0}}));
  EXPECT_TRUE(w.extrapolated);
  // Nearest leaves by untruncated likelihood: centers 7, 6, 5, 4, 3.
  for (std::size_t l = 0; l < 8; ++l) EXPECT_EQ(w.weights[l], l >= 3 ? 0.2 : 0.0);
}

TEST(DensityModelTest, NormalizesAndValidates) {
  const auto s = testing::continuous_schema(1);
  const DensityModel m(s, {gaussian_leaf(0, 2.0, 0, 1), gaussian_leaf(1, 0.0, 0, 1), gaussian_leaf(2, 6.0, 0, 1)});
  EXPECT_EQ(m.num_leaves(), 2u);
  EXPECT_EQ(m.weights()[0], 0.25);
  EXPECT_THROW(DensityModel(s, {gaussian_leaf(0, 1, 0, 1), gaussian_leaf(0, 1, 0, 1)}), InputError);
  EXPECT_THROW(DensityModel(s, {categorical_leaf(0, 1, {1.0})}), InputError);
  EXPECT_THROW(DensityModel(s, {gaussian_leaf(0, 0.0, 0, 1)}), InputError);
}

}  // namespace
}  // namespace carfi
