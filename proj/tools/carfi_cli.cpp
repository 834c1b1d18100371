#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>

#include "carfi/common.hpp"
#include "carfi/experiments.hpp"

using namespace carfi;

namespace {

void emit(const Table& table, const std::string& path) {
  if (path.empty() || path == "-") {
    table.write(std::cout);
  } else {
    table.write(std::filesystem::path(path));
  }
}

void add_bounds_flag(CLI::App* app, FiniteBounds& b) {
  const std::map<std::string, FiniteBounds> names{{"local", FiniteBounds::Local}, {"none", FiniteBounds::None}};
  app->add_option("--finite-bounds", b, "local: clip infinite leaf bounds to the leaf's data range; none: keep them")
      ->transform(CLI::CheckedTransformer(names))
      ->default_str(finite_bounds_name(b));
}

template <typename Config>
void add_model_flags(CLI::App* app, Config& c) {
  app->add_option("--arf-trees", c.arf_trees, "Trees per ARF discriminator")->capture_default_str();
  app->add_option("--learner-trees", c.learner_trees, "Trees in the random-forest learner")->capture_default_str();
  app->add_option("--learner-min-node-size", c.learner_min_node_size, "Min node size of the random-forest learner")
      ->capture_default_str();
  app->add_option("--train-fraction", c.train_fraction, "Share of rows used for fitting")->capture_default_str();
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  add_bounds_flag(app, c.finite_bounds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional feature importance with adversarial random forests"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; flags on the command line take precedence");
  app.allow_config_extras(false);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: CARFI_NUM_THREADS or all cores)");

  auto* simulate = app.add_subcommand("simulate", "Run a simulation study");
  simulate->require_subcommand(1);

  PocConfig poc;
  std::string poc_setting = "linear";
  std::string poc_out, poc_summary;
  auto* poc_cmd = simulate->add_subcommand("poc", "Toeplitz Gaussian features with effect sizes 0..0.9");
  poc_cmd->add_option("--runs", poc.runs, "Simulation runs")->capture_default_str();
  poc_cmd->add_option("--n", poc.n, "Sample size per run")->capture_default_str();
  poc_cmd->add_option("--learners", poc.learners, "Learners (lm, rf)")->delimiter(',')->capture_default_str();
  poc_cmd->add_option("--min-node-sizes", poc.min_node_sizes, "ARF min node sizes")->delimiter(',')
      ->capture_default_str();
  poc_cmd->add_option("--setting", poc_setting, "linear or nonlinear")
      ->check(CLI::IsMember({"linear", "nonlinear"}))
      ->capture_default_str();
  poc_cmd->add_option("--replicates", poc.replicates, "Conditional draws per instance (R)")->capture_default_str();
  poc_cmd->add_option("--alpha", poc.alpha, "Test level")->capture_default_str();
  add_model_flags(poc_cmd, poc);
  poc_cmd->add_option("--out", poc_out, "Per-run table (CSV)");
  poc_cmd->add_option("--summary", poc_summary, "Rejection-rate table (CSV, default stdout)");

  MixedConfig mixed;
  std::string mixed_out, mixed_summary, mixed_timing;
  auto* mixed_cmd = simulate->add_subcommand("mixed", "Mixed continuous/categorical DAG");
  mixed_cmd->add_option("--runs", mixed.runs, "Simulation runs")->capture_default_str();
  mixed_cmd->add_option("--sample-sizes", mixed.sample_sizes, "Sample sizes")->delimiter(',')->capture_default_str();
  mixed_cmd->add_option("--replicates", mixed.replicate_counts, "R values to compare")->delimiter(',')
      ->capture_default_str();
  mixed_cmd->add_option("--sampling-seeds", mixed.sampling_seeds, "Sampling seeds per run for the stability measure")
      ->capture_default_str();
  mixed_cmd->add_option("--learner", mixed.learner, "lm or rf")->capture_default_str();
  mixed_cmd->add_option("--min-node-size", mixed.min_node_size, "ARF min node size")->capture_default_str();
  mixed_cmd->add_option("--beta", mixed.dag.beta, "Effect size")->capture_default_str();
  mixed_cmd->add_option("--levels", mixed.dag.levels, "Levels of the categorical features")->capture_default_str();
  mixed_cmd->add_option("--bin-noise", mixed.dag.bin_noise, "Noise sd before binning x2 into x3")
      ->capture_default_str();
  mixed_cmd->add_option("--alpha", mixed.alpha, "Test level")->capture_default_str();
  add_model_flags(mixed_cmd, mixed);
  mixed_cmd->add_option("--out", mixed_out, "Per-run table (CSV)");
  mixed_cmd->add_option("--summary", mixed_summary, "Rejection-rate table (CSV, default stdout)");
  mixed_cmd->add_option("--timing", mixed_timing, "Per-stage wall-clock table (CSV)");

  CondsetConfig condset;
  std::string condset_out, condset_summary;
  auto* condset_cmd = simulate->add_subcommand("condset", "Marginal vs conditional importance on a linear chain");
  condset_cmd->add_option("--runs", condset.runs, "Simulation runs")->capture_default_str();
  condset_cmd->add_option("--n", condset.n, "Sample size per run")->capture_default_str();
  condset_cmd->add_option("--learners", condset.learners, "Learners (lm, rf)")->delimiter(',')->capture_default_str();
  condset_cmd->add_option("--min-node-size", condset.min_node_size, "ARF min node size")->capture_default_str();
  condset_cmd->add_option("--replicates", condset.replicates, "Conditional draws per instance (R)")
      ->capture_default_str();
  condset_cmd->add_option("--permutations", condset.permutations, "Permutations for PFI")->capture_default_str();
  add_model_flags(condset_cmd, condset);
  condset_cmd->add_option("--out", condset_out, "Per-run table (CSV)");
  condset_cmd->add_option("--summary", condset_summary, "Averaged estimates (CSV, default stdout)");

  ImportanceOptions imp;
  std::string imp_data, imp_schema, imp_features, imp_out;
  auto* imp_cmd = app.add_subcommand("importance", "Feature importance on a CSV file");
  imp_cmd->add_option("--data", imp_data, "Input CSV")->required();
  imp_cmd->add_option("--schema", imp_schema, "Optional schema file");
  imp_cmd->add_option("--target", imp.target, "Target column")->required();
  imp_cmd->add_option("--features", imp_features,
                      "Comma list of features; join columns with '+' to score them as a set (default: all)");
  imp_cmd->add_option("--condition", imp.condition, "all, none, or a comma list of columns")->capture_default_str();
  imp_cmd->add_option("--learner", imp.learner, "lm or rf")->capture_default_str();
  imp_cmd->add_option("--method", imp.method, "carfi, pfi or both")->capture_default_str();
  imp_cmd->add_option("--min-node-size", imp.min_node_size, "ARF min node size")->capture_default_str();
  imp_cmd->add_option("--trees", imp.arf_trees, "Trees per ARF discriminator")->capture_default_str();
  imp_cmd->add_option("--learner-trees", imp.learner_trees, "Trees in the random-forest learner")
      ->capture_default_str();
  imp_cmd->add_option("--replicates", imp.replicates, "Conditional draws per instance (R)")->capture_default_str();
  imp_cmd->add_option("--loss", imp.loss, "mse or rmse")->capture_default_str();
  imp_cmd->add_option("--train-fraction", imp.train_fraction, "Share of rows used for fitting")
      ->capture_default_str();
  imp_cmd->add_option("--seed", imp.seed, "Master seed")->capture_default_str();
  add_bounds_flag(imp_cmd, imp.finite_bounds);
  imp_cmd->add_option("--out", imp_out, "Report table (CSV, default stdout)");

  GenerateOptions gen;
  std::string gen_data, gen_schema, gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Synthetic rows from an ARF fitted on a CSV file");
  gen_cmd->add_option("--data", gen_data, "Input CSV")->required();
  gen_cmd->add_option("--schema", gen_schema, "Optional schema file");
  gen_cmd->add_option("--n", gen.n, "Rows to generate (default: as many as the input)");
  gen_cmd->add_option("--condition", gen.condition, "Fixed values, e.g. \"season=winter,temp=12.5\"");
  gen_cmd->add_option("--min-node-size", gen.min_node_size, "ARF min node size")->capture_default_str();
  gen_cmd->add_option("--trees", gen.arf_trees, "Trees per ARF discriminator")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  add_bounds_flag(gen_cmd, gen.finite_bounds);
  gen_cmd->add_option("--out", gen_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    configure_threads_from_env();
    if (threads > 0) set_num_threads(threads);

    if (*poc_cmd) {
      poc.setting = poc_setting == "linear" ? Setting::Linear : Setting::Nonlinear;
      const auto records = simulate_poc(poc);
      if (!poc_out.empty()) emit(poc_table(poc, records), poc_out);
      emit(poc_summary_table(poc, poc_rates(records, poc.alpha)), poc_summary);
    } else if (*mixed_cmd) {
      const auto result = simulate_mixed(mixed);
      if (!mixed_out.empty()) emit(mixed_table(mixed, result), mixed_out);
      if (!mixed_timing.empty()) emit(mixed_timing_table(mixed, result), mixed_timing);
      emit(mixed_summary_table(mixed, mixed_rates(result, mixed.alpha)), mixed_summary);
    } else if (*condset_cmd) {
      const auto records = simulate_condset(condset);
      if (!condset_out.empty()) emit(condset_table(condset, records), condset_out);
      emit(condset_summary_table(condset, condset_means(records)), condset_summary);
    } else if (*imp_cmd) {
      imp.data = imp_data;
      if (!imp_schema.empty()) imp.schema = imp_schema;
      if (!imp_features.empty()) {
        std::string cur;
        std::istringstream in(imp_features);
        while (std::getline(in, cur, ',')) imp.features.push_back(cur);
      }
      emit(run_importance(imp), imp_out);
    } else if (*gen_cmd) {
      gen.data = gen_data;
      if (!gen_schema.empty()) gen.schema = gen_schema;
      const auto out = run_generate(gen);
      if (gen_out.empty() || gen_out == "-") {
        write_csv(out, std::cout);
      } else {
        write_csv(out, std::filesystem::path(gen_out));
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
