#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "missdiff/bayes_net.hpp"
#include "missdiff/encode.hpp"
#include "missdiff/evaluation.hpp"
#include "missdiff/rng.hpp"

using namespace missdiff;

TEST_CASE("ks statistic") {
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({0, 1, 2}, {10, 11, 12}) == 1.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {1, 2, 3, 8}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(ks_statistic({}, {1.0}), std::invalid_argument);
}

TEST_CASE("tv distance") {
  CHECK(tv_distance({"a", "b"}, {"a", "b"}) == 0.0);
  CHECK(tv_distance({"a", "a"}, {"b", "b"}) == 1.0);
  // (0.5, 0.5) vs (0.8, 0.2).
  CHECK(tv_distance({"x", "x", "y", "y"}, {"x", "x", "x", "x", "y"}) ==
        doctest::Approx(0.3));
  CHECK_THROWS_AS(tv_distance({}, {"a"}), std::invalid_argument);
}

TEST_CASE("fidelity: identical tables score 100, a shifted column drags shape down") {
  Rng rng(1);
  const Table real = generate_bayesian_network(500, rng);
  const Schema schema = real.schema;

  const FidelityReport same = fidelity_score(real, real, schema);
  CHECK(same.composite == doctest::Approx(100.0));

  Table shifted = real;
  const double range = 30.0;  // far beyond the observed spread of C1
  for (auto& row : shifted.rows) row[0] = Cell::number(row[0].num + 10.0 * range);
  const FidelityReport moved = fidelity_score(real, shifted, schema);
  CHECK(moved.shape_scores[0] == doctest::Approx(0.0));
  CHECK(moved.composite < 100.0);
}

TEST_CASE("fidelity: symmetric and invariant to row order on complete tables") {
  Rng rng(2);
  const Table a = generate_bayesian_network(400, rng);
  const Table b = generate_bayesian_network(400, rng);
  const FidelityReport ab = fidelity_score(a, b, a.schema);
  const FidelityReport ba = fidelity_score(b, a, a.schema);
  CHECK(ab.composite == doctest::Approx(ba.composite));

  Table shuffled = b;
  std::reverse(shuffled.rows.begin(), shuffled.rows.end());
  const FidelityReport ab2 = fidelity_score(a, shuffled, a.schema);
  CHECK(ab2.composite == doctest::Approx(ab.composite));
}

TEST_CASE("fidelity: independent resamples of one distribution stay close") {
  Rng rng(3);
  const Table a = generate_bayesian_network(2000, rng);
  const Table b = generate_bayesian_network(2000, rng);
  const FidelityReport r = fidelity_score(a, b, a.schema);
  CHECK(r.composite > 95.0);
}

TEST_CASE("logistic downstream: separable data is fit perfectly") {
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const double v = i < 20 ? -1.0 - 0.05 * i : 1.0 + 0.05 * (i - 20);
    X.push_back({v});
    y.push_back(i < 20 ? 0 : 1);
  }
  const DownstreamModel model =
      fit_downstream(TaskKind::binary_classification, X, y, {}, 2);
  int correct = 0;
  for (size_t i = 0; i < X.size(); ++i) correct += model.predict_class(X[i]) == y[i];
  CHECK(correct == 40);
}

TEST_CASE("ridge downstream: recovers an exact linear relation") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    const double x = 0.1 * i - 2.0;
    X.push_back({x});
    y.push_back(2.0 * x + 1.0);
  }
  const DownstreamModel model = fit_downstream(TaskKind::regression, X, {}, y, 0);
  CHECK(model.ridge_weights[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(model.ridge_weights[1] == doctest::Approx(1.0).epsilon(1e-3));

  // Constant targets: zero slope, intercept at the target.
  std::vector<double> flat(50, 3.5);
  const DownstreamModel constant = fit_downstream(TaskKind::regression, X, {}, flat, 0);
  CHECK(constant.ridge_weights[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(constant.ridge_weights[1] == doctest::Approx(3.5).epsilon(1e-6));
}

TEST_CASE("tstr: synthetic == real train reproduces the train-on-real pipeline exactly") {
  Rng rng(4);
  const Table train = generate_bayesian_network(600, rng);
  const Table test = generate_bayesian_network(400, rng);
  const UtilityReport from_synth = tstr(train, test, train, "D2");
  const UtilityReport baseline = tstr(train, test, train, "D2");
  CHECK(from_synth.task == TaskKind::multiclass_classification);
  CHECK(from_synth.accuracy == baseline.accuracy);
  CHECK(from_synth.f1 == baseline.f1);
  CHECK(from_synth.weighted_f1 == baseline.weighted_f1);
  CHECK(from_synth.auroc == baseline.auroc);
  CHECK(from_synth.accuracy > 0.3);

  CHECK_THROWS_AS(tstr(train, test, train, "nope"), std::invalid_argument);
}

TEST_CASE("tstr: label-shuffled synthetic data falls to the majority rate") {
  Rng rng(5);
  const Table train = generate_bayesian_network(800, rng);
  const Table test = generate_bayesian_network(800, rng);

  Table garbage = train;
  Rng shuffle_rng(6);
  for (auto& row : garbage.rows)
    row[3] = Cell::category(std::to_string(shuffle_rng.next_below(3)));

  // Majority class rate of D2 on the test set.
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < test.n_rows(); ++i) counts[test.at(i, 3).cat[0] - '0']++;
  const double majority =
      static_cast<double>(std::max({counts[0], counts[1], counts[2]})) / test.n_rows();

  const UtilityReport r = tstr(train, test, garbage, "D2");
  CHECK(std::abs(r.accuracy - majority) < 0.15);
}

TEST_CASE("tstr: binary task, degenerate always-negative predictor has F1 zero") {
  // Build a small binary problem where the synthetic labels are constant
  // apart from one positive example that the model cannot separate, so the
  // fitted model predicts the negative class everywhere.
  Table train;
  train.schema.columns = {{"x", ColumnKind::continuous, false, 0, 0, {}},
                          {"y", ColumnKind::categorical, false, 0, 0, {}}};
  Rng rng(7);
  for (int i = 0; i < 100; ++i)
    train.rows.push_back({Cell::number(rng.uniform()),
                          Cell::category(i % 2 ? "pos" : "neg")});
  Table synth = train;
  for (int i = 0; i < 100; ++i)
    synth.rows[static_cast<size_t>(i)][1] = Cell::category(i == 0 ? "pos" : "neg");
  Table test = train;

  const UtilityReport r = tstr(train, test, synth, "y");
  CHECK(r.task == TaskKind::binary_classification);
  // Positive class is the second vocabulary entry ("pos"); it is never
  // predicted, so its F1 vanishes while accuracy sits at the negative rate.
  CHECK(r.f1 == 0.0);
  CHECK(r.accuracy == doctest::Approx(0.5));

  // A class entirely absent from the synthetic table is an error.
  Table missing_class = synth;
  for (auto& row : missing_class.rows) row[1] = Cell::category("neg");
  CHECK_THROWS_AS(tstr(train, test, missing_class, "y"), std::invalid_argument);
}

TEST_CASE("imputation error: zero for perfect completion, masked scoping, mean baseline") {
  Rng rng(8);
  Table truth;
  truth.schema.columns = {{"x", ColumnKind::continuous, false, 0, 0, {}},
                          {"c", ColumnKind::categorical, false, 0, 0, {}}};
  for (int i = 0; i < 400; ++i)
    truth.rows.push_back({Cell::number(rng.normal()),
                          Cell::category(rng.uniform() < 0.5 ? "a" : "b")});
  const Schema fitted = fit_encoder(truth, truth.schema);

  MaskMatrix mask = MaskMatrix::ones(400, 2);
  Rng mask_rng(9);
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < 2; ++j)
      if (mask_rng.uniform() < 0.3) mask.set(i, j, 0);

  const ImputationReport perfect = imputation_error(truth, truth, mask, fitted);
  CHECK_FALSE(perfect.empty);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.categorical_error_rate == 0.0);

  // Changing only observed cells leaves the report untouched.
  Table observed_noise = truth;
  for (int i = 0; i < 400; ++i)
    if (mask.at(i, 0) == 1) observed_noise.at(i, 0).num += 100.0;
  const ImputationReport scoped = imputation_error(observed_noise, truth, mask, fitted);
  CHECK(scoped.rmse == 0.0);

  // Mean imputation lands at the column's normalized standard deviation.
  double mean = 0.0;
  for (int i = 0; i < 400; ++i) mean += truth.at(i, 0).num;
  mean /= 400;
  double sd_missing = 0.0;
  int n_missing = 0;
  for (int i = 0; i < 400; ++i)
    if (mask.at(i, 0) == 0) {
      sd_missing += (truth.at(i, 0).num - mean) * (truth.at(i, 0).num - mean);
      ++n_missing;
    }
  sd_missing = std::sqrt(sd_missing / n_missing);
  const double range = fitted.columns[0].max - fitted.columns[0].min;

  Table mean_filled = truth;
  for (int i = 0; i < 400; ++i)
    if (mask.at(i, 0) == 0) mean_filled.at(i, 0) = Cell::number(mean);
  const ImputationReport mean_report = imputation_error(mean_filled, truth, mask, fitted);
  CHECK(mean_report.rmse == doctest::Approx(sd_missing / range).epsilon(1e-9));

  // All-ones mask: nothing to score.
  const ImputationReport none = imputation_error(truth, truth, MaskMatrix::ones(400, 2), fitted);
  CHECK(none.empty);
}
