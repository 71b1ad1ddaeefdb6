#pragma once

#include <string>
#include <vector>

#include "missdiff/missingness.hpp"
#include "missdiff/table.hpp"

namespace missdiff {

// Two-sample Kolmogorov-Smirnov statistic, sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Total variation distance between empirical category frequencies.
double tv_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Distributional similarity between a real and a synthetic table: per-column
// shape scores (1 - KS for continuous, 1 - TV for categorical), per-pair
// trend scores (1 - |assoc_real - assoc_synth| / 2, association by Pearson
// correlation, Cramer's V, or the correlation ratio depending on the pair's
// kinds), and a composite of the two halves scaled to [0, 100].
struct FidelityReport {
  std::vector<std::string> column_names;
  std::vector<double> shape_scores;
  std::vector<std::string> pair_names;
  std::vector<double> trend_scores;
  double shape_mean = 0.0;
  double trend_mean = 0.0;
  double composite = 0.0;  // percent
};

FidelityReport fidelity_score(const Table& real, const Table& synth, const Schema& schema);

enum class TaskKind { binary_classification, multiclass_classification, regression };

// Logistic regression (one-vs-rest for multiclass) or ridge regression.
// Logistic training is full-batch gradient descent on the mean cross-entropy
// with L2 1e-4 on the weights, 500 iterations at rate 0.1; ridge solves the
// normal equations with the same L2 and an unpenalized intercept.
struct DownstreamModel {
  TaskKind task = TaskKind::regression;
  std::vector<std::string> classes;                 // classification
  std::vector<std::vector<double>> class_weights;   // per class, bias last
  std::vector<double> ridge_weights;                // regression, bias last

  std::vector<double> predict_scores(const std::vector<double>& x) const;
  int predict_class(const std::vector<double>& x) const;
  double predict_value(const std::vector<double>& x) const;
};

DownstreamModel fit_downstream(TaskKind task, const std::vector<std::vector<double>>& X,
                               const std::vector<int>& class_targets,
                               const std::vector<double>& value_targets,
                               int n_classes);

struct UtilityReport {
  TaskKind task = TaskKind::regression;
  double accuracy = 0.0;
  double f1 = 0.0;           // binary F1 or macro F1
  double weighted_f1 = 0.0;  // sum of (1 - p_i) / (K - 1) weighted per-class F1
  double auroc = 0.0;        // rank statistic; one-vs-rest mean for multiclass
  double rmse = 0.0;
  double r2 = 0.0;
};

// Train-synthetic-test-real: fits the downstream model on the synthetic
// table (features encoded through a schema fitted on real_train) and scores
// it on the held-out real test table. Passing real_train as the synthetic
// table reproduces the train-on-real baseline through the same code path.
UtilityReport tstr(const Table& real_train, const Table& real_test, const Table& synth,
                   const std::string& target_column);

struct ImputationReport {
  double rmse = 0.0;  // continuous cells with mask 0, min-max normalized scale
  int continuous_cells = 0;
  double categorical_error_rate = 0.0;
  int categorical_cells = 0;
  bool empty = true;  // no originally-missing cell had ground truth
};

ImputationReport imputation_error(const Table& imputed, const Table& ground_truth,
                                  const MaskMatrix& mask, const Schema& fitted);

std::string fidelity_to_text(const FidelityReport& report);
std::string utility_to_text(const UtilityReport& report);
std::string imputation_to_text(const ImputationReport& report);

}  // namespace missdiff
