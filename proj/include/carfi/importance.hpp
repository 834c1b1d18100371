#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carfi/density.hpp"
#include "carfi/inference.hpp"
#include "carfi/learners.hpp"

namespace carfi {

struct ImportanceQuery {
  std::vector<std::size_t> features;                     // S, feature column indices
  std::optional<std::vector<std::size_t>> conditioning;  // C; unset means every feature outside S
  std::size_t replicates = 1;
  LossFn loss = LossFn::MSE;
  std::uint64_t seed = 0;
};

enum class Method { CArfi, Pfi };

struct StageTimes {
  double conditioning = 0.0;  // seconds
  double sampling = 0.0;      // sampling and prediction
};

struct ImportanceReport {
  Method method = Method::CArfi;
  std::vector<std::size_t> features;
  std::vector<std::size_t> conditioning;
  std::size_t replicates = 1;
  LossFn loss = LossFn::MSE;
  std::uint64_t seed = 0;

  double estimate = 0.0;  // mean of deltas
  std::vector<double> deltas;
  TTestResult test;
  // Aggregate loss (MSE or RMSE) of the original and the replaced predictions.
  double base_loss = 0.0;
  double replaced_loss = 0.0;
  std::size_t extrapolated = 0;  // instances whose evidence no leaf supported
  StageTimes times;

  double loss_difference() const { return replaced_loss - base_loss; }
};

// Feature-space views of a test set carrying a target column.
struct TestData {
  Dataset features;
  std::vector<double> y;
  static TestData from(const Dataset& test);
};

// Column indices here refer to the feature schema (target removed).
ImportanceReport carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                       const ImportanceQuery& query);

// Several queries in one pass over the test instances; each report matches
// the single-query call exactly.
std::vector<ImportanceReport> carfi(const Dataset& test, const Learner& learner, const DensityModel& model,
                                    std::span<const ImportanceQuery> queries);

// Marginal baseline: S replaced by `permutations` joint random permutations
// of its test values.
ImportanceReport pfi(const Dataset& test, const Learner& learner, const std::vector<std::size_t>& features,
                     std::size_t permutations, LossFn loss, std::uint64_t seed);

std::vector<ImportanceReport> importance_profile(const Dataset& test, const Learner& learner,
                                                 const DensityModel& model, const std::vector<std::size_t>& features,
                                                 const std::vector<std::vector<std::size_t>>& conditioning_sets,
                                                 std::size_t replicates, LossFn loss, std::uint64_t seed);

// Resolved conditioning set (sorted); validates the query against p features.
std::vector<std::size_t> resolve_conditioning(const ImportanceQuery& query, std::size_t p);

// Column labels for report tables: names joined by '+', "none" when empty.
std::string describe_columns(const Schema& features, std::span<const std::size_t> cols);

namespace detail {

// Content hash of a test instance, features then target.
std::uint64_t instance_key(std::span<const double> row, double y);

void check_compatible(const Schema& test_features, const Learner& learner, const DensityModel* model);

// Takes per-instance deltas, each the mean over replicates of (replaced loss
// - base loss), and fills the estimate, the test and the aggregate losses.
void finish_report(ImportanceReport& report, std::span<const double> base_sq, std::span<const double> deltas);

}  // namespace detail

}  // namespace carfi
