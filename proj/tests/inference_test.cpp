#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "carfi/inference.hpp"
#include "carfi/simgen.hpp"

namespace carfi {
namespace {

using boost::multiprecision::cpp_bin_float_50;

double oracle_sf(double t, double df) {
  const boost::math::students_t_distribution<cpp_bin_float_50> dist{cpp_bin_float_50(df)};
  return static_cast<double>(boost::math::cdf(boost::math::complement(dist, cpp_bin_float_50(t))));
}

TEST(StudentT, MatchesHighPrecisionOracle) {
  for (double df : {1.0, 2.0, 5.0, 10.0, 30.0, 100.0}) {
    for (int k = -50; k <= 50; ++k) {
      const double t = k / 10.0;
      EXPECT_NEAR(student_t_sf(t, df), oracle_sf(t, df), 1e-10) << "t=" << t << " df=" << df;
    }
  }
}

TEST(StudentT, ClosedForms) {
  EXPECT_EQ(student_t_sf(0.0, 7.3), 0.5);
  EXPECT_NEAR(student_t_sf(1.0, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(student_t_sf(1.812, 10.0), 0.05, 5e-4);
  EXPECT_THROW(student_t_sf(1.0, 0.0), std::invalid_argument);
}

TEST(StudentT, MonotoneAndNormalLimit) {
  double prev = 1.0;
  for (int k = -80; k <= 80; ++k) {
    const double v = student_t_sf(k / 10.0, 4.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
  const boost::math::normal_distribution<double> z;
  for (int k = -40; k <= 40; ++k) {
    const double t = k / 10.0;
    EXPECT_LT(std::fabs(student_t_sf(t, 1e6) - boost::math::cdf(boost::math::complement(z, t))), 1e-3);
  }
}

TEST(IncompleteBeta, MatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 15.0}) {
    for (double b : {0.5, 3.0, 50.0}) {
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(x, a, b), boost::math::ibeta(a, b, x), 1e-12);
      }
    }
  }
}

TEST(PairedT, WorkedExample) {
  const std::vector<double> d{1, 2, 3};
  const auto r = paired_t_one_sided(d);
  EXPECT_DOUBLE_EQ(r.mean, 2.0);
  EXPECT_DOUBLE_EQ(r.sd, 1.0);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_NEAR(r.t, 2.0 * std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(r.p_value, oracle_sf(2.0 * std::sqrt(3.0), 2.0), 1e-12);
  EXPECT_NEAR(r.p_value, 0.0371, 1e-4);
}

TEST(PairedT, DegenerateAndSymmetry) {
  const auto z = paired_t_one_sided(std::vector<double>(5, 0.0));
  EXPECT_EQ(z.t, 0.0);
  EXPECT_EQ(z.p_value, 0.5);
  EXPECT_EQ(paired_t_one_sided(std::vector<double>{2, 2}).p_value, 0.0);
  EXPECT_EQ(paired_t_one_sided(std::vector<double>{-2, -2}).p_value, 1.0);
  EXPECT_THROW(paired_t_one_sided(std::vector<double>{1}), std::invalid_argument);

  const std::vector<double> d{0.3, -1.2, 2.5, 0.1, 0.7};
  std::vector<double> neg(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) neg[i] = -d[i];
  const auto a = paired_t_one_sided(d), b = paired_t_one_sided(neg);
  EXPECT_DOUBLE_EQ(a.t, -b.t);
  EXPECT_NEAR(a.p_value, 1 - b.p_value, 1e-14);
}

TEST(PairedT, NullRejectionRate) {
  Rng rng(2024);
  const int tests = 10000;
  int rejected = 0;
  std::vector<double> d(30);
  for (int k = 0; k < tests; ++k) {
    for (auto& v : d) v = standard_normal(rng);
    rejected += paired_t_one_sided(d).p_value < 0.05;
  }
  // 99% binomial band around 0.05 at 10^4 tests.
  const double rate = rejected / static_cast<double>(tests);
  EXPECT_GE(rate, 0.05 - 2.576 * std::sqrt(0.05 * 0.95 / tests));
  EXPECT_LE(rate, 0.05 + 2.576 * std::sqrt(0.05 * 0.95 / tests));
}

}  // namespace
}  // namespace carfi
