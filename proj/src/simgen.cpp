#include "carfi/simgen.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "carfi/distributions.hpp"

namespace carfi {

double standard_normal(Rng& rng) {
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return normal_quantile(u);
}

std::vector<double> default_betas(std::size_t p) {
  std::vector<double> b(p);
  for (std::size_t j = 0; j < p; ++j) b[j] = static_cast<double>(j) / 10.0;
  return b;
}

double nonlinear_transform(double x) {
  static const double lo = normal_quantile(0.25), hi = normal_quantile(0.75);
  return (x >= lo && x <= hi) ? 1.0 : -1.0;
}

std::vector<double> toeplitz_covariance(std::size_t p) {
  std::vector<double> s(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      s[i * p + j] = std::pow(0.5, static_cast<double>(i > j ? i - j : j - i));
    }
  }
  return s;
}

namespace {

std::vector<Column> numbered(std::size_t p) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) cols.push_back({"x" + std::to_string(j + 1), FeatureKind::continuous()});
  return cols;
}

std::vector<std::string> labels(const std::string& prefix, std::size_t levels) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < levels; ++k) out.push_back(prefix + std::to_string(k + 1));
  return out;
}

}  // namespace

Dataset gen_toeplitz(std::size_t n, std::size_t p, const std::vector<double>& betas, Setting setting,
                     std::uint64_t seed) {
  if (n < 1 || p < 1) throw InputError("need n >= 1 and p >= 1");
  if (betas.size() != p) throw InputError("need one effect size per feature");
  const auto cov = toeplitz_covariance(p);
  Eigen::MatrixXd s(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) s(i, j) = cov[i * p + j];
  }
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(s).matrixL();

  std::vector<std::vector<double>> cols(p + 1, std::vector<double>(n));
  Rng rng(derive_seed(seed));
  Eigen::VectorXd z(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z(j) = standard_normal(rng);
    const Eigen::VectorXd x = l * z;
    double y = standard_normal(rng);
    for (std::size_t j = 0; j < p; ++j) {
      cols[j][i] = x(j);
      y += betas[j] * (setting == Setting::Linear ? x(j) : nonlinear_transform(x(j)));
    }
    cols[p][i] = y;
  }
  auto columns = numbered(p);
  columns.push_back({"y", FeatureKind::continuous()});
  return Dataset(Schema(std::move(columns), "y"), std::move(cols));
}

double level_effect(std::size_t level, std::size_t levels) {
  return levels < 2 ? 0.0 : 2.0 * static_cast<double>(level) / static_cast<double>(levels - 1) - 1.0;
}

Dataset gen_mixed_dag(std::size_t n, const MixedDagParams& params, std::uint64_t seed) {
  if (n < 1) throw InputError("need n >= 1");
  if (params.levels < 2) throw InputError("need at least two levels");
  const std::size_t levels = params.levels;
  std::vector<double> cuts(levels - 1);
  const double spread = std::sqrt(1.0 + params.bin_noise * params.bin_noise);
  for (std::size_t k = 0; k + 1 < levels; ++k) {
    cuts[k] = spread * normal_quantile(static_cast<double>(k + 1) / static_cast<double>(levels));
  }
  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  Rng rng(derive_seed(seed));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x1 = uniform_index(rng, levels);
    const double x2 = standard_normal(rng);
    const double latent = x2 + params.bin_noise * standard_normal(rng);
    std::size_t x3 = 0;
    while (x3 + 1 < levels && latent > cuts[x3]) ++x3;
    const double x4 = 2.0 * level_effect(x1, levels) + standard_normal(rng);
    const double y = params.beta * (x4 + 2.0 * level_effect(x3, levels)) + standard_normal(rng);
    cols[0][i] = static_cast<double>(x1);
    cols[1][i] = x2;
    cols[2][i] = static_cast<double>(x3);
    cols[3][i] = x4;
    cols[4][i] = y;
  }
  Schema schema({{"x1", FeatureKind::categorical(labels("a", levels))},
                 {"x2", FeatureKind::continuous()},
                 {"x3", FeatureKind::categorical(labels("b", levels))},
                 {"x4", FeatureKind::continuous()},
                 {"y", FeatureKind::continuous()}},
                "y");
  return Dataset(std::move(schema), std::move(cols));
}

Dataset gen_condset_dag(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("need n >= 1");
  std::vector<std::vector<double>> cols(6, std::vector<double>(n));
  Rng rng(derive_seed(seed));
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = standard_normal(rng);
    const double x2 = x1 + standard_normal(rng);
    const double x3 = x2 + standard_normal(rng);
    const double x4 = x1 + 0.3 * standard_normal(rng);
    const double x5 = x3 + 0.7 * standard_normal(rng);
    const double y = x3 + x4 + 0.5 * standard_normal(rng);
    for (std::size_t j = 0; const double v : {x1, x2, x3, x4, x5, y}) cols[j++][i] = v;
  }
  auto columns = numbered(5);
  columns.push_back({"y", FeatureKind::continuous()});
  return Dataset(Schema(std::move(columns), "y"), std::move(cols));
}

std::vector<double> condset_covariance() {
  // Each variable as a linear combination of the independent noises
  // (e1, e2, e3, e4, e5, ey).
  const double a[6][6] = {
      {1, 0, 0, 0, 0, 0},
      {1, 1, 0, 0, 0, 0},
      {1, 1, 1, 0, 0, 0},
      {1, 0, 0, 0.3, 0, 0},
      {1, 1, 1, 0, 0.7, 0},
      {2, 1, 1, 0.3, 0, 0.5},
  };
  std::vector<double> cov(36, 0.0);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      for (int k = 0; k < 6; ++k) cov[static_cast<std::size_t>(i * 6 + j)] += a[i][k] * a[j][k];
    }
  }
  return cov;
}

}  // namespace carfi
