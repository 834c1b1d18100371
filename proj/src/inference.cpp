#include "carfi/inference.hpp"

#include <cmath>
#include <limits>

#include "carfi/common.hpp"

namespace carfi {

namespace {

// Continued fraction for I_x(a, b) (modified Lentz); valid for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 200000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately to keep precision near 1.
double ibeta(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x > 0.5 ? std::log1p(-y) : std::log(x);
  const double log_y = y > 0.5 ? std::log1p(-x) : std::log(y);
  const double log_front = a * log_x + b * log_y - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(y, b, a) / b;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw InputError("incomplete beta needs positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta needs x in [0, 1]");
  return ibeta(x, 1.0 - x, a, b);
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw InputError("degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double tail = 0.5 * ibeta(x, y, 0.5 * df, 0.5);
  return t > 0.0 ? tail : 1.0 - tail;
}

TTestResult paired_t_one_sided(std::span<const double> deltas) {
  const std::size_t n = deltas.size();
  if (n < 2) throw InputError("paired t-test needs at least two deltas");
  TTestResult r;
  r.n = n;
  r.df = static_cast<double>(n - 1);
  double sum = 0.0;
  for (double d : deltas) sum += d;
  r.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double d : deltas) ss += (d - r.mean) * (d - r.mean);
  r.sd = std::sqrt(ss / r.df);
  if (r.sd == 0.0) {
    if (r.mean > 0.0) {
      r.t = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    } else if (r.mean < 0.0) {
      r.t = -std::numeric_limits<double>::infinity();
      r.p_value = 1.0;
    } else {
      r.t = 0.0;
      r.p_value = 0.5;
    }
    return r;
  }
  r.t = r.mean / (r.sd / std::sqrt(static_cast<double>(n)));
  r.p_value = student_t_sf(r.t, r.df);
  return r;
}

}  // namespace carfi
