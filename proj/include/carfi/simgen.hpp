#pragma once

#include <cstdint>
#include <vector>

#include "carfi/common.hpp"
#include "carfi/tabular.hpp"

namespace carfi {

// N(0, 1) by inversion of a uniform on the open interval (0, 1).
double standard_normal(Rng& rng);

enum class Setting { Linear, Nonlinear };

// Features x1..xp ~ N(0, S) with S_ij = 0.5^|i-j|; target y = sum_j beta_j g(x_j)
// + N(0, 1), g the identity (Linear) or +1 inside the central quartile band
// and -1 outside (Nonlinear).
Dataset gen_toeplitz(std::size_t n, std::size_t p, const std::vector<double>& betas, Setting setting,
                     std::uint64_t seed);
std::vector<double> default_betas(std::size_t p);
double nonlinear_transform(double x);
std::vector<double> toeplitz_covariance(std::size_t p);

struct MixedDagParams {
  double beta = 0.5;
  std::size_t levels = 10;
  double bin_noise = 0.5;  // sd of the noise added to x2 before binning into x3
};

// x1 categorical root, x4 = a(x1) + N(0,1), x2 ~ N(0,1), x3 = quantile bin of
// x2 + noise, y = beta (x4 + b(x3)) + N(0,1).
Dataset gen_mixed_dag(std::size_t n, const MixedDagParams& params, std::uint64_t seed);
// Level effect shared by a() and b(): evenly spaced on [-1, 1].
double level_effect(std::size_t level, std::size_t levels);

// Linear Gaussian chain with unit coefficients:
// x1 -> x2 -> x3 -> x5, x1 -> x4, y = x3 + x4 + noise.
Dataset gen_condset_dag(std::size_t n, std::uint64_t seed);
// Covariance of (x1, ..., x5, y) implied by the structural equations.
std::vector<double> condset_covariance();

}  // namespace carfi
