#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "missdiff/diffusion.hpp"
#include "missdiff/evaluation.hpp"

namespace missdiff {

// Grid runner over mechanisms x ratios x methods x seeds. Methods name the
// training modes: missdiff, diff_mean (mean/mode imputation first),
// diff_delete (drop incomplete rows first).
struct ExperimentConfig {
  std::string dataset = "bn:2000";  // "bn:<n>" or a CSV path
  std::string test_dataset;         // CSV path; for bn data, generated when empty
  int bn_test_rows = 2000;
  uint64_t data_seed = 1234;

  std::vector<std::string> mechanisms = {"mcar_independent"};
  std::vector<double> ratios = {0.2};
  std::vector<std::string> methods = {"missdiff", "diff_mean", "diff_delete"};
  std::vector<uint64_t> seeds = {1, 2, 3};

  TrainConfig train;     // per-cell seed is filled in by the runner
  std::string target;    // utility target column; empty skips utility
  bool run_imputation = false;
  std::string out_dir;   // empty skips file output
};

ExperimentConfig experiment_config_from_json(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Training fields from a JSON object; absent fields keep their defaults.
TrainConfig train_config_from_json_text(const std::string& json_text);

// Stable hash of the canonical JSON form (field order independent).
uint64_t experiment_config_hash(const ExperimentConfig& config);

struct RunRecord {
  std::string mechanism;
  double ratio = 0.0;
  std::string method;
  uint64_t seed = 0;
  std::string status = "ok";  // "ok" | "not_applicable" | "error: <what>"
  double fidelity = 0.0;
  bool has_utility = false;
  UtilityReport utility;
  bool has_imputation = false;
  ImputationReport imputation;
  double wall_seconds = 0.0;
  uint64_t config_hash = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::string summary_csv;                      // per-cell mean/std over seeds
  std::vector<std::pair<std::string, std::string>> curve_csv;  // mechanism -> csv
};

// Executes the full grid; a failing cell is recorded and the grid continues.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace missdiff
