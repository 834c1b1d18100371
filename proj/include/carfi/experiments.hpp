#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "carfi/arf.hpp"
#include "carfi/density.hpp"
#include "carfi/simgen.hpp"
#include "carfi/table.hpp"

namespace carfi {

// ---- proof of concept: Toeplitz Gaussian features, effect sizes 0..0.9 ----

struct PocConfig {
  std::size_t runs = 300;
  std::size_t n = 500;
  std::vector<std::string> learners{"lm"};
  std::vector<int> min_node_sizes{20};
  Setting setting = Setting::Linear;
  double train_fraction = 0.5;
  std::size_t replicates = 1;
  int arf_trees = 30;
  int learner_trees = 100;
  int learner_min_node_size = 5;
  double alpha = 0.05;
  FiniteBounds finite_bounds = FiniteBounds::Local;
  std::uint64_t seed = 1;
};

struct PocRecord {
  std::size_t run = 0;
  std::string learner;
  int min_node_size = 0;
  std::size_t feature = 0;
  double effect = 0.0;
  double estimate = 0.0, t = 0.0, p_value = 1.0;
  int arf_iterations = 0;
};

struct PocRate {
  std::string learner;
  int min_node_size = 0;
  double effect = 0.0;
  double rate = 0.0;
  std::size_t runs = 0;
};

std::vector<PocRecord> simulate_poc(const PocConfig& config);
std::vector<PocRate> poc_rates(const std::vector<PocRecord>& records, double alpha);
Table poc_table(const PocConfig& config, const std::vector<PocRecord>& records);
Table poc_summary_table(const PocConfig& config, const std::vector<PocRate>& rates);

// ---- mixed-data DAG --------------------------------------------------------

struct MixedConfig {
  std::size_t runs = 300;
  std::vector<std::size_t> sample_sizes{2000};
  std::vector<std::size_t> replicate_counts{1, 20};
  // Independent sampling seeds per run; the spread of the rejection rate
  // across them measures the stability of the test. Seeds after the first
  // are only run for `seed_features`.
  std::size_t sampling_seeds = 5;
  std::vector<std::size_t> seed_features{0, 1};
  std::string learner = "rf";
  int min_node_size = 20;
  int arf_trees = 30;
  int learner_trees = 100;
  int learner_min_node_size = 5;
  MixedDagParams dag;
  double train_fraction = 0.5;
  double alpha = 0.05;
  FiniteBounds finite_bounds = FiniteBounds::Local;
  std::uint64_t seed = 1;
};

struct MixedRecord {
  std::size_t run = 0, n = 0, replicates = 0, sampling_seed = 0, feature = 0;
  double estimate = 0.0, t = 0.0, p_value = 1.0;
};

struct MixedTiming {
  std::size_t run = 0, n = 0, replicates = 0;
  double arf_fit = 0.0, forde = 0.0, conditioning = 0.0, sampling = 0.0;  // seconds, first sampling seed, all features
};

struct MixedResult {
  std::vector<MixedRecord> records;
  std::vector<MixedTiming> timings;
};

struct MixedRate {
  std::size_t n = 0, replicates = 0, feature = 0;
  double rate = 0.0;     // first sampling seed
  std::optional<double> rate_sd;  // sample sd of the rate across sampling seeds
  std::size_t runs = 0;
};

MixedResult simulate_mixed(const MixedConfig& config);
std::vector<MixedRate> mixed_rates(const MixedResult& result, double alpha);
Table mixed_table(const MixedConfig& config, const MixedResult& result);
Table mixed_summary_table(const MixedConfig& config, const std::vector<MixedRate>& rates);
Table mixed_timing_table(const MixedConfig& config, const MixedResult& result);

// ---- conditioning-set DAG --------------------------------------------------

struct CondsetConfig {
  std::size_t runs = 50;
  std::size_t n = 3000;
  std::vector<std::string> learners{"lm", "rf"};
  int min_node_size = 20;
  int arf_trees = 30;
  int learner_trees = 100;
  int learner_min_node_size = 5;
  std::size_t replicates = 1;
  std::size_t permutations = 1;
  double train_fraction = 0.5;
  FiniteBounds finite_bounds = FiniteBounds::Local;
  std::uint64_t seed = 1;
};

struct CondsetRecord {
  std::size_t run = 0;
  std::string learner;
  std::string feature;
  std::string method;        // pfi or carfi
  std::string conditioning;  // "-" for pfi
  double estimate = 0.0, t = 0.0, p_value = 1.0;
};

struct CondsetMean {
  std::string learner, feature, method, conditioning;
  double mean = 0.0, sd = 0.0;
  std::size_t runs = 0;
};

std::vector<CondsetRecord> simulate_condset(const CondsetConfig& config);
std::vector<CondsetMean> condset_means(const std::vector<CondsetRecord>& records);
Table condset_table(const CondsetConfig& config, const std::vector<CondsetRecord>& records);
Table condset_summary_table(const CondsetConfig& config, const std::vector<CondsetMean>& means);

// ---- ad-hoc analysis on user data ------------------------------------------

struct ImportanceOptions {
  std::filesystem::path data;
  std::optional<std::filesystem::path> schema;
  std::string target;
  // Entries are single columns or '+'-joined column sets; empty means every
  // feature on its own.
  std::vector<std::string> features;
  std::string condition = "all";  // all, none, or a comma list
  std::string learner = "rf";
  std::string method = "carfi";  // carfi, pfi or both
  int min_node_size = 20;
  int arf_trees = 30;
  int learner_trees = 100;
  int learner_min_node_size = 5;
  std::size_t replicates = 1;
  std::string loss = "mse";
  double train_fraction = 0.5;
  FiniteBounds finite_bounds = FiniteBounds::Local;
  std::uint64_t seed = 1;
};

Table run_importance(const ImportanceOptions& options);

struct GenerateOptions {
  std::filesystem::path data;
  std::optional<std::filesystem::path> schema;
  std::size_t n = 0;           // 0: as many rows as the input
  std::string condition;       // "col=value,..." ; empty for unconditional
  int min_node_size = 20;
  int arf_trees = 30;
  FiniteBounds finite_bounds = FiniteBounds::Local;
  std::uint64_t seed = 1;
};

Dataset run_generate(const GenerateOptions& options);

// "col=value,..." against a schema; categorical values are level labels.
Evidence parse_evidence(const Schema& schema, const std::string& text);

const char* finite_bounds_name(FiniteBounds b);

}  // namespace carfi
