#pragma once

#include <cmath>
#include <vector>

#include "carfi/common.hpp"
#include "carfi/simgen.hpp"
#include "carfi/tabular.hpp"

namespace carfi::testing {

inline Schema continuous_schema(std::size_t p, std::optional<std::string> target = std::nullopt) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) cols.push_back({"x" + std::to_string(j + 1), FeatureKind::continuous()});
  if (target) cols.push_back({*target, FeatureKind::continuous()});
  return Schema(std::move(cols), target);
}

// Standard bivariate Gaussian pair with correlation rho.
inline Dataset gaussian_pair(std::size_t n, double rho, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = standard_normal(rng), b = standard_normal(rng);
    cols[0][i] = a;
    cols[1][i] = rho * a + std::sqrt(1 - rho * rho) * b;
  }
  return Dataset(continuous_schema(2), std::move(cols));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace carfi::testing
