#include "carfi/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carfi {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

TruncatedNormal::TruncatedNormal(double mean, double sd, double lower, double upper)
    : mean_(mean), sd_(sd), lower_(lower), upper_(upper) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw InputError("truncated normal needs a positive finite sd");
  if (!(lower < upper)) throw InputError("truncated normal needs lower < upper");
  alpha_ = (lower - mean) / sd;
  beta_ = (upper - mean) / sd;
  // Use the tail on the side away from the mean to avoid cancellation.
  mass_ = alpha_ > 0.0 ? normal_sf(alpha_) - normal_sf(beta_) : normal_cdf(beta_) - normal_cdf(alpha_);
  if (!(mass_ > 0.0)) {
    // Interval lies so far in a tail that the mass underflows; treat the
    // density as a point mass at the nearer bound for sampling purposes.
    mass_ = std::numeric_limits<double>::min();
  }
  log_norm_ = std::log(sd_) + 0.5 * std::log(2.0 * std::numbers::pi) + std::log(mass_);
}

double TruncatedNormal::pdf(double x) const { return std::exp(log_pdf(x)); }

double TruncatedNormal::cdf(double x) const {
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  const double z = (x - mean_) / sd_;
  const double c = alpha_ > 0.0 ? (normal_sf(alpha_) - normal_sf(z)) / mass_ : (normal_cdf(z) - normal_cdf(alpha_)) / mass_;
  return std::clamp(c, 0.0, 1.0);
}

double TruncatedNormal::quantile(double u) const {
  double z;
  if (alpha_ > 0.0) {
    // Upper-tail interval: invert the survival function.
    const double sa = normal_sf(alpha_);
    const double sb = normal_sf(beta_);
    z = -normal_quantile(sa - u * (sa - sb));
  } else {
    const double ca = normal_cdf(alpha_);
    const double cb = normal_cdf(beta_);
    z = normal_quantile(ca + u * (cb - ca));
  }
  if (!std::isfinite(z)) z = alpha_ > 0.0 ? alpha_ : (std::isfinite(alpha_) ? alpha_ : beta_);
  return std::clamp(mean_ + sd_ * z, lower_, upper_);
}

}  // namespace carfi
