#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "carfi/arf.hpp"
#include "carfi/distributions.hpp"
#include "carfi/tabular.hpp"

namespace carfi {

enum class FiniteBounds { None, Local };

struct FordeOptions {
  // Local: infinite region bounds replaced by the leaf's empirical min/max.
  FiniteBounds finite_bounds = FiniteBounds::Local;
  // Additive smoothing over the levels admissible in a leaf.
  double epsilon = 1e-3;
  // Leaf sd floor as a fraction of the feature's global sd.
  double sd_floor = 1e-6;
};

// Univariate density of one feature inside one leaf.
class FeatureDensity {
 public:
  static FeatureDensity gaussian(TruncatedNormal tn);
  static FeatureDensity categorical(std::vector<double> probs);

  bool is_categorical() const { return !probs_.empty(); }
  const TruncatedNormal& gaussian() const { return gaussian_; }
  const std::vector<double>& probs() const { return probs_; }

  double log_pdf(double x) const {
    return probs_.empty() ? gaussian_.log_pdf(x) : log_probs_[static_cast<std::size_t>(x)];
  }
  // False exactly where log_pdf is -inf.
  bool supports(double x) const {
    return probs_.empty() ? !(x < gaussian_.lower() || x > gaussian_.upper()) : probs_[static_cast<std::size_t>(x)] > 0.0;
  }
  double sample(Rng& rng) const;

 private:
  TruncatedNormal gaussian_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

struct LeafDensity {
  std::size_t id = 0;    // forest-wide leaf id
  std::size_t tree = 0;
  double weight = 0.0;   // share of real rows, divided by the number of trees
  std::vector<FeatureDensity> features;

  double log_density(std::span<const double> row) const;
};

// Mixture of per-leaf products of univariate densities.
class DensityModel {
 public:
  // Weights are renormalized to sum to one; zero-weight leaves are dropped.
  DensityModel(Schema schema, std::vector<LeafDensity> leaves, FordeOptions options = {});

  const Schema& schema() const { return schema_; }
  const FordeOptions& options() const { return options_; }
  std::size_t num_leaves() const { return leaves_.size(); }
  const LeafDensity& leaf(std::size_t l) const { return leaves_[l]; }
  const std::vector<LeafDensity>& leaves() const { return leaves_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> log_weights() const { return log_weights_; }

 private:
  Schema schema_;
  std::vector<LeafDensity> leaves_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  FordeOptions options_;
};

// Leaf weights updated by point evidence, indexed like DensityModel leaves.
struct ConditionalWeights {
  Evidence evidence;
  std::vector<double> weights;
  bool extrapolated = false;  // no leaf supports the evidence; fallback used
};

DensityModel forde(const ArfModel& arf, const FordeOptions& options = {});

double log_joint_density(const DensityModel& model, std::span<const double> row);
double joint_density(const DensityModel& model, std::span<const double> row);

ConditionalWeights condition(const DensityModel& model, const Evidence& evidence);
// Further conditioning of already-updated weights on disjoint evidence.
ConditionalWeights condition(const DensityModel& model, const ConditionalWeights& prior, const Evidence& evidence);

namespace detail {

inline constexpr std::size_t kFallbackLeaves = 5;

// In place: log weights -> normalized weights. Returns false when every
// entry is -inf (the vector is then left untouched).
bool normalize_log_weights(std::span<double> log_w);

// Uniform weights over the k leaves that best support the evidence: fewest
// out-of-support factors, then highest log-likelihood with truncation
// ignored. Only leaves with positive prior weight are eligible.
std::vector<double> fallback_weights(const DensityModel& model, std::span<const double> prior,
                                     const Evidence& evidence);

// Index of the first cumulative weight exceeding u * total. Zero-weight
// entries are never returned, so dense and zero-stripped cumulative arrays
// give the same draw.
inline std::size_t draw_from_cumulative(std::span<const double> cumulative, double u) {
  const double total = cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * total);
  if (it == cumulative.end()) it = std::lower_bound(cumulative.begin(), cumulative.end(), total);
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace detail

}  // namespace carfi
