#include <gtest/gtest.h>

#include <sstream>

#include "carfi/experiments.hpp"

namespace carfi {
namespace {

PocConfig small_poc() {
  PocConfig c;
  c.runs = 3;
  c.n = 200;
  c.arf_trees = 10;
  return c;
}

std::string render(const Table& t) {
  std::ostringstream out;
  t.write(out);
  return out.str();
}

TEST(SimulatePoc, DeterministicAndThreadIndependent) {
  const auto c = small_poc();
  const auto a = render(poc_table(c, simulate_poc(c)));
  set_num_threads(1);
  const auto b = render(poc_table(c, simulate_poc(c)));
  set_num_threads(max_threads());
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("min_node_size"), std::string::npos);
}

TEST(SimulatePoc, RowsSortedByRunAndRatesCountRuns) {
  const auto c = small_poc();
  const auto records = simulate_poc(c);
  ASSERT_EQ(records.size(), c.runs * 10);
  for (std::size_t k = 1; k < records.size(); ++k) EXPECT_LE(records[k - 1].run, records[k].run);
  const auto rates = poc_rates(records, c.alpha);
  ASSERT_EQ(rates.size(), 10u);
  for (const auto& r : rates) {
    EXPECT_EQ(r.runs, c.runs);
    std::size_t rejected = 0;
    for (const auto& rec : records) {
      if (rec.effect == r.effect) rejected += rec.p_value < c.alpha;
    }
    EXPECT_DOUBLE_EQ(r.rate, static_cast<double>(rejected) / c.runs);
  }
}

TEST(SimulateMixed, StabilitySeedsOnlyForNullFeatures) {
  MixedConfig c;
  c.runs = 2;
  c.sample_sizes = {300};
  c.sampling_seeds = 3;
  c.learner = "lm";
  c.arf_trees = 10;
  const auto result = simulate_mixed(c);
  EXPECT_EQ(result.records.size(), c.runs * 2 * (4 + 2 * 2));
  EXPECT_EQ(result.timings.size(), c.runs * 2);
  for (const auto& r : mixed_rates(result, c.alpha)) {
    EXPECT_EQ(r.rate_sd.has_value(), r.feature < 2);
    EXPECT_EQ(r.runs, c.runs);
  }
}

TEST(SimulateCondset, ProducesEveryConditioningSet) {
  CondsetConfig c;
  c.runs = 1;
  c.n = 400;
  c.learners = {"lm"};
  c.arf_trees = 10;
  const auto means = condset_means(simulate_condset(c));
  // Per feature: PFI plus six conditioning sets.
  EXPECT_EQ(means.size(), 2u * 7u);
}

TEST(ParseEvidence, ColumnsAndLevels) {
  const Schema s({{"a", FeatureKind::continuous()}, {"b", FeatureKind::categorical({"u", "v"})}});
  const auto e = parse_evidence(s, "b=v, a=2.5");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.assignments()[0], (std::pair<std::size_t, double>{0, 2.5}));
  EXPECT_EQ(e.assignments()[1], (std::pair<std::size_t, double>{1, 1.0}));
  EXPECT_THROW(parse_evidence(s, "c=1"), InputError);
  EXPECT_THROW(parse_evidence(s, "b=w"), InputError);
  EXPECT_THROW(parse_evidence(s, "a"), InputError);
  EXPECT_THROW(parse_evidence(s, "a=x"), InputError);
}

}  // namespace
}  // namespace carfi
