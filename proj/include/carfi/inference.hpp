#pragma once

#include <cstddef>
#include <span>

namespace carfi {

struct TTestResult {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator)
  double df = 0.0;
  double t = 0.0;
  double p_value = 0.5;  // one-sided, P(T_df > t)
  std::size_t n = 0;
};

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double x, double a, double b);

// Upper tail P(T > t) of Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

// One-sided paired t-test of H0: E[delta] <= 0 against E[delta] > 0.
// Zero variance: p = 0 for a positive mean, 1 for a negative mean, 0.5 at 0.
TTestResult paired_t_one_sided(std::span<const double> deltas);

}  // namespace carfi
