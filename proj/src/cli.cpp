#include "missdiff/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "missdiff/bayes_net.hpp"
#include "missdiff/checkpoint.hpp"
#include "missdiff/csv.hpp"
#include "missdiff/diffusion.hpp"
#include "missdiff/evaluation.hpp"
#include "missdiff/experiment.hpp"

namespace missdiff {

namespace {

using nlohmann::json;

// CLI-layer validation failure: maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_usage(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

Table read_table(const std::string& path, const std::string& schema_path) {
  std::optional<Schema> schema;
  if (!schema_path.empty()) schema = load_schema_json(schema_path);
  return read_csv_file(path, schema);
}

std::vector<std::string> column_names(const Table& t) {
  std::vector<std::string> names;
  for (const ColumnSpec& c : t.schema.columns) names.push_back(c.name);
  return names;
}

json fidelity_to_json(const FidelityReport& r) {
  json shapes = json::object(), trends = json::object();
  for (size_t i = 0; i < r.column_names.size(); ++i)
    shapes[r.column_names[i]] = r.shape_scores[i];
  for (size_t i = 0; i < r.pair_names.size(); ++i) trends[r.pair_names[i]] = r.trend_scores[i];
  return json{{"composite_percent", r.composite},
              {"shape_mean", r.shape_mean},
              {"trend_mean", r.trend_mean},
              {"shapes", shapes},
              {"trends", trends}};
}

json utility_report_json(const UtilityReport& u) {
  if (u.task == TaskKind::regression)
    return json{{"task", "regression"}, {"rmse", u.rmse}, {"r2", u.r2}};
  return json{{"task", u.task == TaskKind::binary_classification
                           ? "binary_classification"
                           : "multiclass_classification"},
              {"accuracy", u.accuracy},
              {"f1", u.f1},
              {"weighted_f1", u.weighted_f1},
              {"auroc", u.auroc}};
}

int cmd_generate_data(int bn_rows, const std::string& csv_in, uint64_t seed,
                      const std::string& out) {
  if (bn_rows > 0) {
    Rng rng(seed);
    write_csv_file(generate_bayesian_network(bn_rows, rng), out);
  } else {
    // Validate and normalize an existing file.
    write_csv_file(read_csv_file(csv_in), out);
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_mask(const std::string& data_path, const std::string& schema_path,
             const std::string& mech_name, double ratio, double always_observed,
             uint64_t seed, const std::string& out, const std::string& mask_out) {
  const Table table = read_table(data_path, schema_path);
  MechanismConfig config;
  config.kind = mechanism_from_string(mech_name);
  config.ratio = ratio;
  config.always_observed_fraction = always_observed;
  Rng rng(seed);
  const MaskMatrix mask = generate_mask(config, table, rng);
  write_csv_file(apply_mask(table, mask), out);
  if (!mask_out.empty()) write_mask_csv_file(mask, column_names(table), mask_out);
  const MissingRateStats stats = missing_rate_stats(mask);
  std::cout << "wrote " << out << " (max column missing rate "
            << format_double(stats.max_rate) << ")\n";
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& schema_path,
              const std::string& mask_path, TrainConfig config, const std::string& out,
              bool quiet) {
  const Table observed = read_table(data_path, schema_path);
  const int stride = std::max(1, config.epochs / 10);
  const EpochCallback progress = [&](int epoch, double loss, double lr) {
    if (quiet) return;
    if (epoch % stride == 0 || epoch == config.epochs - 1)
      std::cerr << "epoch " << epoch + 1 << "/" << config.epochs << " loss "
                << format_double(loss) << " lr " << format_double(lr) << "\n";
  };
  const Checkpoint ckpt =
      mask_path.empty() ? train(observed, config, progress)
                        : train(observed, read_mask_csv_file(mask_path), config, progress);
  save_checkpoint(ckpt, out);
  std::cout << "wrote " << out << "\n"
            << "final loss " << format_double(ckpt.loss_trace.back())
            << ", max column missing rate " << format_double(ckpt.max_missing_rate)
            << ", loss/(1-max_rate) " << format_double(ckpt.nll_bound_coefficient())
            << "\n";
  return 0;
}

int cmd_sample(const std::string& checkpoint_path, int n, uint64_t seed,
               const std::string& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Rng rng(seed);
  write_csv_file(sample(ckpt, n, rng), out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_impute(const std::string& checkpoint_path, const std::string& data_path,
               const std::string& schema_path, int k, uint64_t seed,
               const std::string& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const Table observed = read_table(data_path, schema_path);
  Rng rng(seed);
  const std::vector<Table> completions = impute(ckpt, observed, k, rng);
  if (k == 1) {
    write_csv_file(completions[0], out);
    std::cout << "wrote " << out << "\n";
    return 0;
  }
  const std::filesystem::path path(out);
  const std::string stem = (path.parent_path() / path.stem()).string();
  const std::string ext = path.extension().string();
  for (int i = 0; i < k; ++i) {
    const std::string name = stem + "_" + std::to_string(i + 1) + ext;
    write_csv_file(completions[static_cast<size_t>(i)], name);
    std::cout << "wrote " << name << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& real_path, const std::string& synth_path,
                 const std::string& schema_path, const std::string& train_path,
                 const std::string& test_path, const std::string& target,
                 const std::string& imputed_path, const std::string& truth_path,
                 const std::string& mask_path, const std::string& out) {
  json report = json::object();
  bool did_anything = false;

  if (!real_path.empty() && !synth_path.empty()) {
    const Table real = read_table(real_path, schema_path);
    const Table synth = read_csv_file(synth_path, real.schema);
    const FidelityReport fidelity = fidelity_score(real, synth, real.schema);
    std::cout << fidelity_to_text(fidelity);
    report["fidelity"] = fidelity_to_json(fidelity);
    did_anything = true;
  }

  if (!target.empty()) {
    require_usage(!train_path.empty() && !test_path.empty() && !synth_path.empty(),
                  "--target needs --train-real, --test-real and --synth");
    const Table train_table = read_table(train_path, schema_path);
    const Table test_table = read_csv_file(test_path, train_table.schema);
    const Table synth = read_csv_file(synth_path, train_table.schema);
    const UtilityReport utility = tstr(train_table, test_table, synth, target);
    std::cout << utility_to_text(utility);
    report["utility"] = utility_report_json(utility);
    did_anything = true;
  }

  if (!imputed_path.empty()) {
    require_usage(!truth_path.empty() && !mask_path.empty(),
                  "--imputed needs --truth and --mask");
    const Table truth = read_table(truth_path, schema_path);
    const Table imputed = read_csv_file(imputed_path, truth.schema);
    const MaskMatrix mask = read_mask_csv_file(mask_path);
    const Schema fitted = fit_encoder(truth, truth.schema);
    const ImputationReport imp = imputation_error(imputed, truth, mask, fitted);
    std::cout << imputation_to_text(imp);
    report["imputation"] = json{{"rmse", imp.rmse},
                                {"continuous_cells", imp.continuous_cells},
                                {"categorical_error_rate", imp.categorical_error_rate},
                                {"categorical_cells", imp.categorical_cells},
                                {"empty", imp.empty}};
    did_anything = true;
  }

  require_usage(did_anything,
                "nothing to evaluate; pass --real/--synth, --target, or --imputed");
  if (!out.empty()) write_text_file(out, report.dump(2) + "\n");
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   const std::string& seeds_csv) {
  ExperimentConfig config = experiment_config_from_json(read_text_file(config_path));
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (!seeds_csv.empty()) {
    config.seeds.clear();
    std::stringstream ss(seeds_csv);
    std::string item;
    while (std::getline(ss, item, ',')) config.seeds.push_back(std::stoull(item));
  }
  const ExperimentResult result = run_experiment(config, std::cout);
  std::cout << result.summary_csv;
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"diffusion-based synthesis, imputation and evaluation for mixed-type "
               "tables with missing values"};
  app.require_subcommand(1);

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "write a table as CSV");
  int bn_rows = 0;
  std::string gen_csv, gen_out;
  uint64_t gen_seed = 0;
  gen->add_option("--bn", bn_rows, "rows to draw from the built-in Bayesian network");
  gen->add_option("--csv", gen_csv, "validate and copy an existing CSV");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("-o,--out", gen_out, "output CSV path")->required();

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "hide cells under a missingness mechanism");
  std::string mask_data, mask_schema, mask_mech = "mcar_independent", mask_out_table,
              mask_out_mask;
  double mask_ratio = 0.2, mask_always = 0.3;
  uint64_t mask_seed = 0;
  mask_cmd->add_option("--data", mask_data, "input CSV")->required();
  mask_cmd->add_option("--schema", mask_schema, "schema override JSON");
  mask_cmd->add_option("--mech", mask_mech,
                       "mcar_row | mcar_column | mcar_independent | mar | nmar");
  mask_cmd->add_option("--ratio", mask_ratio, "missing ratio in (0,1)");
  mask_cmd->add_option("--always-observed-frac", mask_always,
                       "fraction of always-observed columns (mar/nmar)");
  mask_cmd->add_option("--seed", mask_seed, "random seed");
  mask_cmd->add_option("-o,--out", mask_out_table, "masked CSV path")->required();
  mask_cmd->add_option("--mask-out", mask_out_mask, "0/1 mask CSV path");

  // train
  auto* train_cmd = app.add_subcommand("train", "fit the model on an observed table");
  std::string train_data, train_schema, train_mask, train_out, train_config_path;
  std::string train_mode = "missdiff";
  TrainConfig train_flags;
  bool train_quiet = false;
  train_cmd->add_option("--data", train_data, "observed CSV (empty fields are missing)")
      ->required();
  train_cmd->add_option("--schema", train_schema, "schema override JSON");
  train_cmd->add_option("--mask", train_mask, "0/1 mask CSV; inferred when absent");
  train_cmd->add_option("--config", train_config_path,
                        "training config JSON; explicit flags win");
  auto* mode_opt =
      train_cmd->add_option("--mode", train_mode, "missdiff | mean_impute | row_delete");
  auto* epochs_opt = train_cmd->add_option("--epochs", train_flags.epochs, "training epochs");
  auto* batch_opt = train_cmd->add_option("--batch", train_flags.batch, "batch size");
  auto* steps_opt = train_cmd->add_option("--steps", train_flags.T, "diffusion steps T");
  auto* seed_opt = train_cmd->add_option("--seed", train_flags.seed, "random seed");
  train_cmd->add_flag("--quiet", train_quiet, "suppress progress lines");
  train_cmd->add_option("-o,--out", train_out, "checkpoint path")->required();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw complete rows from a checkpoint");
  std::string sample_ckpt, sample_out;
  int sample_n = 0;
  uint64_t sample_seed = 0;
  sample_cmd->add_option("--checkpoint", sample_ckpt, "checkpoint path")->required();
  sample_cmd->add_option("-n,--rows", sample_n, "rows to draw")->required();
  sample_cmd->add_option("--seed", sample_seed, "random seed");
  sample_cmd->add_option("-o,--out", sample_out, "output CSV path")->required();

  // impute
  auto* impute_cmd = app.add_subcommand("impute", "complete missing cells conditionally");
  std::string impute_ckpt, impute_data, impute_schema, impute_out;
  int impute_k = 1;
  uint64_t impute_seed = 0;
  impute_cmd->add_option("--checkpoint", impute_ckpt, "checkpoint path")->required();
  impute_cmd->add_option("--data", impute_data, "observed CSV")->required();
  impute_cmd->add_option("--schema", impute_schema, "schema override JSON");
  impute_cmd->add_option("-k,--completions", impute_k, "independent completions");
  impute_cmd->add_option("--seed", impute_seed, "random seed");
  impute_cmd->add_option("-o,--out", impute_out, "output CSV path")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "fidelity, utility and imputation scores");
  std::string eval_real, eval_synth, eval_schema, eval_train, eval_test, eval_target,
      eval_imputed, eval_truth, eval_mask, eval_out;
  eval_cmd->add_option("--real", eval_real, "real CSV for fidelity");
  eval_cmd->add_option("--synth", eval_synth, "synthetic CSV");
  eval_cmd->add_option("--schema", eval_schema, "schema override JSON");
  eval_cmd->add_option("--train-real", eval_train, "real training CSV (utility)");
  eval_cmd->add_option("--test-real", eval_test, "real held-out CSV (utility)");
  eval_cmd->add_option("--target", eval_target, "target column (utility)");
  eval_cmd->add_option("--imputed", eval_imputed, "imputed CSV (imputation error)");
  eval_cmd->add_option("--truth", eval_truth, "ground-truth CSV (imputation error)");
  eval_cmd->add_option("--mask", eval_mask, "0/1 mask CSV (imputation error)");
  eval_cmd->add_option("-o,--out", eval_out, "JSON report path");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run a mechanism x ratio x method grid");
  std::string exp_config, exp_out, exp_seeds;
  exp_cmd->add_option("--config", exp_config, "experiment config JSON")->required();
  exp_cmd->add_option("-o,--out", exp_out, "output directory (overrides config)");
  exp_cmd->add_option("--seeds", exp_seeds, "comma-separated seed list override");

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      require_usage(bn_rows > 0 || !gen_csv.empty(), "one of --bn or --csv is required");
      require_usage(gen_csv.empty() || bn_rows == 0, "--bn and --csv are exclusive");
      return cmd_generate_data(bn_rows, gen_csv, gen_seed, gen_out);
    }
    if (mask_cmd->parsed()) {
      require_usage(mask_ratio > 0.0 && mask_ratio < 1.0, "--ratio must be in (0,1)");
      return cmd_mask(mask_data, mask_schema, mask_mech, mask_ratio, mask_always,
                      mask_seed, mask_out_table, mask_out_mask);
    }
    if (train_cmd->parsed()) {
      TrainConfig train_config;
      if (!train_config_path.empty())
        train_config = train_config_from_json_text(read_text_file(train_config_path));
      if (epochs_opt->count()) train_config.epochs = train_flags.epochs;
      if (batch_opt->count()) train_config.batch = train_flags.batch;
      if (steps_opt->count()) train_config.T = train_flags.T;
      if (seed_opt->count()) train_config.seed = train_flags.seed;
      if (mode_opt->count() || train_config_path.empty())
        train_config.mode = train_mode_from_string(train_mode);
      require_usage(train_config.epochs > 0, "--epochs must be positive");
      require_usage(train_config.batch > 0, "--batch must be positive");
      require_usage(train_config.T >= 2, "--steps must be at least 2");
      return cmd_train(train_data, train_schema, train_mask, train_config, train_out,
                       train_quiet);
    }
    if (sample_cmd->parsed()) {
      require_usage(sample_n > 0, "-n must be positive");
      return cmd_sample(sample_ckpt, sample_n, sample_seed, sample_out);
    }
    if (impute_cmd->parsed()) {
      require_usage(impute_k > 0, "-k must be positive");
      return cmd_impute(impute_ckpt, impute_data, impute_schema, impute_k, impute_seed,
                        impute_out);
    }
    if (eval_cmd->parsed())
      return cmd_evaluate(eval_real, eval_synth, eval_schema, eval_train, eval_test,
                          eval_target, eval_imputed, eval_truth, eval_mask, eval_out);
    if (exp_cmd->parsed()) return cmd_experiment(exp_config, exp_out, exp_seeds);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("missdiff");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace missdiff
