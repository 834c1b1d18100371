#pragma once

#include <limits>

#include "carfi/common.hpp"

namespace carfi {

double normal_pdf(double z);
double normal_cdf(double z);
// Upper tail 1 - Phi(z), accurate far into the tail.
double normal_sf(double z);
// Inverse of the standard normal cdf (Wichura's AS241, ~1e-16 relative).
double normal_quantile(double p);

// Gaussian restricted to [lower, upper]; infinite bounds allowed.
class TruncatedNormal {
 public:
  TruncatedNormal() = default;
  TruncatedNormal(double mean, double sd, double lower = -std::numeric_limits<double>::infinity(),
                  double upper = std::numeric_limits<double>::infinity());

  double mean() const { return mean_; }
  double sd() const { return sd_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double log_pdf(double x) const {
    if (x < lower_ || x > upper_) return -std::numeric_limits<double>::infinity();
    const double z = (x - mean_) / sd_;
    return -0.5 * z * z - log_norm_;
  }
  double pdf(double x) const;
  double cdf(double x) const;
  // Inverse cdf on the truncated interval; u in [0, 1).
  double quantile(double u) const;
  double sample(Rng& rng) const { return quantile(uniform01(rng)); }

 private:
  double mean_ = 0.0;
  double sd_ = 1.0;
  double lower_ = -std::numeric_limits<double>::infinity();
  double upper_ = std::numeric_limits<double>::infinity();
  double alpha_ = 0.0, beta_ = 0.0;  // standardized bounds
  double mass_ = 1.0;                // Phi(beta) - Phi(alpha)
  double log_norm_ = 0.0;            // log(sd * sqrt(2 pi) * mass)
};

}  // namespace carfi
