#include "missdiff/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "missdiff/encode.hpp"

namespace missdiff {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> observed_numbers(const Table& t, int j) {
  std::vector<double> out;
  for (int i = 0; i < t.n_rows(); ++i)
    if (!t.at(i, j).is_na()) out.push_back(t.at(i, j).num);
  return out;
}

std::vector<std::string> observed_categories(const Table& t, int j) {
  std::vector<std::string> out;
  for (int i = 0; i < t.n_rows(); ++i)
    if (!t.at(i, j).is_na()) out.push_back(t.at(i, j).cat);
  return out;
}

// Pearson correlation over rows where both columns are observed; 0 when
// either side is degenerate.
double pearson(const Table& t, int a, int b) {
  std::vector<double> xs, ys;
  for (int i = 0; i < t.n_rows(); ++i)
    if (!t.at(i, a).is_na() && !t.at(i, b).is_na()) {
      xs.push_back(t.at(i, a).num);
      ys.push_back(t.at(i, b).num);
    }
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Cramer's V from the observed-pair contingency table; 0 when either margin
// is constant.
double cramers_v(const Table& t, int a, int b) {
  std::map<std::string, int> ca, cb;
  std::map<std::pair<std::string, std::string>, int> joint;
  int n = 0;
  for (int i = 0; i < t.n_rows(); ++i) {
    if (t.at(i, a).is_na() || t.at(i, b).is_na()) continue;
    const std::string& va = t.at(i, a).cat;
    const std::string& vb = t.at(i, b).cat;
    if (ca.emplace(va, static_cast<int>(ca.size())).second) {}
    if (cb.emplace(vb, static_cast<int>(cb.size())).second) {}
    joint[{va, vb}] += 1;
    ++n;
  }
  const int r = static_cast<int>(ca.size()), c = static_cast<int>(cb.size());
  if (n == 0 || r < 2 || c < 2) return 0.0;

  std::vector<double> row_sum(static_cast<size_t>(r), 0.0), col_sum(static_cast<size_t>(c), 0.0);
  for (const auto& [key, count] : joint) {
    row_sum[static_cast<size_t>(ca[key.first])] += count;
    col_sum[static_cast<size_t>(cb[key.second])] += count;
  }
  double chi2 = 0.0;
  for (const auto& [ra, ia] : ca)
    for (const auto& [cbk, ib] : cb) {
      const double expected = row_sum[static_cast<size_t>(ia)] *
                              col_sum[static_cast<size_t>(ib)] / n;
      if (expected <= 0.0) continue;
      const auto it = joint.find({ra, cbk});
      const double observed = it == joint.end() ? 0.0 : it->second;
      chi2 += (observed - expected) * (observed - expected) / expected;
    }
  return std::sqrt(chi2 / (static_cast<double>(n) * (std::min(r, c) - 1)));
}

// Correlation ratio between a categorical grouping and a continuous column;
// 0 when the continuous side is constant.
double correlation_ratio(const Table& t, int cat_col, int num_col) {
  std::unordered_map<std::string, std::pair<double, int>> groups;  // sum, count
  std::vector<double> values;
  std::vector<std::string> labels;
  for (int i = 0; i < t.n_rows(); ++i) {
    if (t.at(i, cat_col).is_na() || t.at(i, num_col).is_na()) continue;
    values.push_back(t.at(i, num_col).num);
    labels.push_back(t.at(i, cat_col).cat);
    auto& g = groups[labels.back()];
    g.first += values.back();
    g.second += 1;
  }
  if (values.empty()) return 0.0;
  double total_mean = 0.0;
  for (double v : values) total_mean += v;
  total_mean /= static_cast<double>(values.size());
  double ss_total = 0.0;
  for (double v : values) ss_total += (v - total_mean) * (v - total_mean);
  if (ss_total == 0.0) return 0.0;
  double ss_between = 0.0;
  for (const auto& [label, g] : groups) {
    const double gm = g.first / g.second;
    ss_between += g.second * (gm - total_mean) * (gm - total_mean);
  }
  return std::sqrt(ss_between / ss_total);
}

double association(const Table& t, int a, int b) {
  const bool a_cont = t.schema.columns[static_cast<size_t>(a)].kind == ColumnKind::continuous;
  const bool b_cont = t.schema.columns[static_cast<size_t>(b)].kind == ColumnKind::continuous;
  if (a_cont && b_cont) return pearson(t, a, b);
  if (!a_cont && !b_cont) return cramers_v(t, a, b);
  return a_cont ? correlation_ratio(t, b, a) : correlation_ratio(t, a, b);
}

struct F1Counts {
  int tp = 0, fp = 0, fn = 0;
  double f1() const {
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
  }
};

// Mann-Whitney AUROC with midranks for ties.
double auroc_rank(const std::vector<double>& scores, const std::vector<int>& positive) {
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  int n_pos = 0;
  for (size_t k = 0; k < n; ++k)
    if (positive[k]) {
      pos_rank_sum += rank[k];
      ++n_pos;
    }
  const int n_neg = static_cast<int>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) /
         (static_cast<double>(n_pos) * n_neg);
}

std::vector<std::vector<double>> encode_features(const Table& t, const Schema& feature_schema,
                                                 int target_index) {
  Table features;
  features.schema = feature_schema;
  for (const auto& row : t.rows) {
    std::vector<Cell> r;
    for (size_t j = 0; j < row.size(); ++j)
      if (static_cast<int>(j) != target_index) r.push_back(row[j]);
    features.rows.push_back(std::move(r));
  }
  const Encoded enc = encode(features, feature_schema);
  std::vector<std::vector<double>> X(static_cast<size_t>(enc.batch.matrix.shape[0]));
  const int64_t width = enc.batch.matrix.shape[1];
  for (int64_t i = 0; i < enc.batch.matrix.shape[0]; ++i) {
    X[static_cast<size_t>(i)].resize(static_cast<size_t>(width));
    for (int64_t j = 0; j < width; ++j)
      X[static_cast<size_t>(i)][static_cast<size_t>(j)] = enc.batch.matrix.at(i, j);
  }
  return X;
}

std::vector<double> fit_binary_logistic(const std::vector<std::vector<double>>& X,
                                        const std::vector<int>& y) {
  const size_t n = X.size(), p = X[0].size();
  std::vector<double> w(p + 1, 0.0);  // bias last, unregularized
  const double lr = 0.1, l2 = 1e-4;
  std::vector<double> grad(p + 1);
  for (int iter = 0; iter < 500; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double z = w[p];
      for (size_t j = 0; j < p; ++j) z += w[j] * X[i][j];
      const double err = sigmoid(z) - y[i];
      for (size_t j = 0; j < p; ++j) grad[j] += err * X[i][j];
      grad[p] += err;
    }
    for (size_t j = 0; j < p; ++j) w[j] -= lr * (grad[j] / n + l2 * w[j]);
    w[p] -= lr * grad[p] / n;
  }
  return w;
}

std::vector<double> fit_ridge(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y) {
  const size_t n = X.size(), p = X[0].size();
  const size_t dim = p + 1;
  const double l2 = 1e-4;
  std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
  std::vector<double> b(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> xi(X[i]);
    xi.push_back(1.0);
    for (size_t r = 0; r < dim; ++r) {
      for (size_t c = 0; c < dim; ++c) A[r][c] += xi[r] * xi[c];
      b[r] += xi[r] * y[i];
    }
  }
  for (size_t j = 0; j < p; ++j) A[j][j] += l2;  // intercept unpenalized

  // Gaussian elimination with partial pivoting.
  for (size_t col = 0; col < dim; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < dim; ++r)
      if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
    std::swap(A[col], A[pivot]);
    std::swap(b[col], b[pivot]);
    if (A[col][col] == 0.0) throw std::runtime_error("ridge: singular system");
    for (size_t r = 0; r < dim; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (size_t c = col; c < dim; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> w(dim);
  for (size_t j = 0; j < dim; ++j) w[j] = b[j] / A[j][j];
  return w;
}

}  // namespace

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t ia = 0, ib = 0;
  double best = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    best = std::max(best, std::abs(static_cast<double>(ia) / a.size() -
                                   static_cast<double>(ib) / b.size()));
  }
  return best;
}

double tv_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv_distance: empty sample");
  std::map<std::string, double> pa, pb;
  for (const auto& v : a) pa[v] += 1.0 / a.size();
  for (const auto& v : b) pb[v] += 1.0 / b.size();
  double acc = 0.0;
  for (const auto& [k, v] : pa) acc += std::abs(v - (pb.count(k) ? pb[k] : 0.0));
  for (const auto& [k, v] : pb)
    if (!pa.count(k)) acc += v;
  return acc / 2.0;
}

FidelityReport fidelity_score(const Table& real, const Table& synth, const Schema& schema) {
  if (real.n_cols() != schema.n_cols() || synth.n_cols() != schema.n_cols())
    throw std::invalid_argument("fidelity_score: schema mismatch");
  FidelityReport report;
  for (int j = 0; j < schema.n_cols(); ++j) {
    const ColumnSpec& spec = schema.columns[static_cast<size_t>(j)];
    report.column_names.push_back(spec.name);
    if (spec.kind == ColumnKind::continuous) {
      report.shape_scores.push_back(
          1.0 - ks_statistic(observed_numbers(real, j), observed_numbers(synth, j)));
    } else {
      report.shape_scores.push_back(
          1.0 - tv_distance(observed_categories(real, j), observed_categories(synth, j)));
    }
  }
  for (int a = 0; a < schema.n_cols(); ++a)
    for (int b = a + 1; b < schema.n_cols(); ++b) {
      report.pair_names.push_back(schema.columns[static_cast<size_t>(a)].name + "~" +
                                  schema.columns[static_cast<size_t>(b)].name);
      const double diff = std::abs(association(real, a, b) - association(synth, a, b));
      report.trend_scores.push_back(1.0 - diff / 2.0);
    }

  report.shape_mean =
      std::accumulate(report.shape_scores.begin(), report.shape_scores.end(), 0.0) /
      static_cast<double>(report.shape_scores.size());
  if (report.trend_scores.empty()) {
    report.trend_mean = 0.0;
    report.composite = 100.0 * report.shape_mean;
  } else {
    report.trend_mean =
        std::accumulate(report.trend_scores.begin(), report.trend_scores.end(), 0.0) /
        static_cast<double>(report.trend_scores.size());
    report.composite = 100.0 * (report.shape_mean + report.trend_mean) / 2.0;
  }
  return report;
}

std::vector<double> DownstreamModel::predict_scores(const std::vector<double>& x) const {
  std::vector<double> scores;
  for (const auto& w : class_weights) {
    double z = w.back();
    for (size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
    scores.push_back(sigmoid(z));
  }
  return scores;
}

int DownstreamModel::predict_class(const std::vector<double>& x) const {
  const std::vector<double> scores = predict_scores(x);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

double DownstreamModel::predict_value(const std::vector<double>& x) const {
  double z = ridge_weights.back();
  for (size_t j = 0; j < x.size(); ++j) z += ridge_weights[j] * x[j];
  return z;
}

DownstreamModel fit_downstream(TaskKind task, const std::vector<std::vector<double>>& X,
                               const std::vector<int>& class_targets,
                               const std::vector<double>& value_targets, int n_classes) {
  if (X.empty()) throw std::invalid_argument("fit_downstream: empty feature matrix");
  DownstreamModel model;
  model.task = task;
  if (task == TaskKind::regression) {
    model.ridge_weights = fit_ridge(X, value_targets);
    return model;
  }
  if (n_classes < 2) throw std::invalid_argument("fit_downstream: need at least 2 classes");
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int> y(class_targets.size());
    for (size_t i = 0; i < y.size(); ++i) y[i] = class_targets[i] == c ? 1 : 0;
    model.class_weights.push_back(fit_binary_logistic(X, y));
  }
  return model;
}

UtilityReport tstr(const Table& real_train, const Table& real_test, const Table& synth,
                   const std::string& target_column) {
  const int target = real_train.schema.column_index(target_column);
  if (target < 0)
    throw std::invalid_argument("tstr: target column '" + target_column + "' not found");
  if (real_test.n_cols() != real_train.n_cols() || synth.n_cols() != real_train.n_cols())
    throw std::invalid_argument("tstr: tables must share the schema");

  // Feature encoder fitted on the real training table.
  Schema feature_schema;
  for (int j = 0; j < real_train.n_cols(); ++j)
    if (j != target)
      feature_schema.columns.push_back(real_train.schema.columns[static_cast<size_t>(j)]);
  Table train_features;
  train_features.schema = feature_schema;
  for (const auto& row : real_train.rows) {
    std::vector<Cell> r;
    for (size_t j = 0; j < row.size(); ++j)
      if (static_cast<int>(j) != target) r.push_back(row[j]);
    train_features.rows.push_back(std::move(r));
  }
  feature_schema = fit_encoder(train_features, feature_schema);

  const ColumnSpec& target_spec = real_train.schema.columns[static_cast<size_t>(target)];
  UtilityReport report;

  if (target_spec.kind == ColumnKind::categorical) {
    // Class vocabulary in first-appearance order over the real training data.
    std::vector<std::string> classes;
    for (int i = 0; i < real_train.n_rows(); ++i) {
      const Cell& c = real_train.at(i, target);
      if (c.is_na()) continue;
      if (std::find(classes.begin(), classes.end(), c.cat) == classes.end())
        classes.push_back(c.cat);
    }
    const int K = static_cast<int>(classes.size());
    if (K < 2) throw std::invalid_argument("tstr: target has a single class");
    report.task = K == 2 ? TaskKind::binary_classification
                         : TaskKind::multiclass_classification;

    auto class_of = [&](const Cell& c) {
      const auto it = std::find(classes.begin(), classes.end(), c.cat);
      if (it == classes.end())
        throw std::invalid_argument("tstr: unseen target class '" + c.cat + "'");
      return static_cast<int>(it - classes.begin());
    };

    std::vector<std::vector<double>> Xs = encode_features(synth, feature_schema, target);
    std::vector<int> ys;
    std::vector<std::vector<double>> Xs_kept;
    std::vector<bool> class_seen(static_cast<size_t>(K), false);
    for (int i = 0; i < synth.n_rows(); ++i) {
      if (synth.at(i, target).is_na()) continue;
      const int c = class_of(synth.at(i, target));
      class_seen[static_cast<size_t>(c)] = true;
      ys.push_back(c);
      Xs_kept.push_back(std::move(Xs[static_cast<size_t>(i)]));
    }
    for (int c = 0; c < K; ++c)
      if (!class_seen[static_cast<size_t>(c)])
        throw std::invalid_argument("tstr: class '" + classes[static_cast<size_t>(c)] +
                                    "' absent from the synthetic table");

    DownstreamModel model =
        fit_downstream(report.task, Xs_kept, ys, {}, K);
    model.classes = classes;

    std::vector<std::vector<double>> Xt = encode_features(real_test, feature_schema, target);
    std::vector<int> yt;
    std::vector<int> predictions;
    std::vector<std::vector<double>> all_scores;
    for (int i = 0; i < real_test.n_rows(); ++i) {
      if (real_test.at(i, target).is_na()) continue;
      yt.push_back(class_of(real_test.at(i, target)));
      predictions.push_back(model.predict_class(Xt[static_cast<size_t>(i)]));
      all_scores.push_back(model.predict_scores(Xt[static_cast<size_t>(i)]));
    }
    const size_t n = yt.size();
    if (n == 0) throw std::invalid_argument("tstr: no labeled test rows");

    int correct = 0;
    std::vector<F1Counts> per_class(static_cast<size_t>(K));
    std::vector<double> prior(static_cast<size_t>(K), 0.0);
    for (size_t i = 0; i < n; ++i) {
      correct += predictions[i] == yt[i];
      prior[static_cast<size_t>(yt[i])] += 1.0 / static_cast<double>(n);
      for (int c = 0; c < K; ++c) {
        const bool truth = yt[i] == c, pred = predictions[i] == c;
        if (truth && pred) ++per_class[static_cast<size_t>(c)].tp;
        if (!truth && pred) ++per_class[static_cast<size_t>(c)].fp;
        if (truth && !pred) ++per_class[static_cast<size_t>(c)].fn;
      }
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    if (K == 2) {
      // Positive class: the second label in vocabulary order.
      report.f1 = per_class[1].f1();
    } else {
      double macro = 0.0;
      for (const F1Counts& f : per_class) macro += f.f1();
      report.f1 = macro / K;
    }

    // Weighted F1 with w_i = (1 - p_i) / (K - 1), priors from the test set.
    double weighted = 0.0;
    for (int c = 0; c < K; ++c)
      weighted += (1.0 - prior[static_cast<size_t>(c)]) / (K - 1) *
                  per_class[static_cast<size_t>(c)].f1();
    report.weighted_f1 = weighted;

    // Binary: rank the positive class. Multiclass: mean one-vs-rest AUROC.
    double auroc_sum = 0.0;
    int auroc_terms = 0;
    const int c_begin = K == 2 ? 1 : 0;
    const int c_end = K == 2 ? 2 : K;
    for (int c = c_begin; c < c_end; ++c) {
      std::vector<double> score(n);
      std::vector<int> positive(n);
      for (size_t i = 0; i < n; ++i) {
        score[i] = all_scores[i][static_cast<size_t>(c)];
        positive[i] = yt[i] == c;
      }
      auroc_sum += auroc_rank(score, positive);
      ++auroc_terms;
    }
    report.auroc = auroc_sum / auroc_terms;
    return report;
  }

  // Regression on a continuous target.
  report.task = TaskKind::regression;
  std::vector<std::vector<double>> Xs = encode_features(synth, feature_schema, target);
  std::vector<double> ys;
  std::vector<std::vector<double>> Xs_kept;
  for (int i = 0; i < synth.n_rows(); ++i) {
    if (synth.at(i, target).is_na()) continue;
    ys.push_back(synth.at(i, target).num);
    Xs_kept.push_back(std::move(Xs[static_cast<size_t>(i)]));
  }
  const DownstreamModel model = fit_downstream(TaskKind::regression, Xs_kept, {}, ys, 0);

  std::vector<std::vector<double>> Xt = encode_features(real_test, feature_schema, target);
  double se = 0.0, sst = 0.0, mean_y = 0.0;
  std::vector<double> truth, pred;
  for (int i = 0; i < real_test.n_rows(); ++i) {
    if (real_test.at(i, target).is_na()) continue;
    truth.push_back(real_test.at(i, target).num);
    pred.push_back(model.predict_value(Xt[static_cast<size_t>(i)]));
  }
  if (truth.empty()) throw std::invalid_argument("tstr: no labeled test rows");
  for (double v : truth) mean_y += v;
  mean_y /= static_cast<double>(truth.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    se += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    sst += (truth[i] - mean_y) * (truth[i] - mean_y);
  }
  report.rmse = std::sqrt(se / static_cast<double>(truth.size()));
  report.r2 = sst == 0.0 ? (se == 0.0 ? 1.0 : 0.0) : 1.0 - se / sst;
  return report;
}

ImputationReport imputation_error(const Table& imputed, const Table& ground_truth,
                                  const MaskMatrix& mask, const Schema& fitted) {
  if (imputed.n_rows() != ground_truth.n_rows() || imputed.n_cols() != ground_truth.n_cols() ||
      mask.n != imputed.n_rows() || mask.d != imputed.n_cols())
    throw std::invalid_argument("imputation_error: shape mismatch");
  ImputationReport report;
  double se = 0.0;
  int cat_errors = 0;
  for (int i = 0; i < mask.n; ++i)
    for (int j = 0; j < mask.d; ++j) {
      if (mask.at(i, j) != 0) continue;
      const Cell& truth = ground_truth.at(i, j);
      if (truth.is_na()) continue;  // no ground truth for this hole
      const Cell& guess = imputed.at(i, j);
      if (guess.is_na())
        throw std::invalid_argument("imputation_error: imputed table still has holes");
      const ColumnSpec& spec = fitted.columns[static_cast<size_t>(j)];
      if (spec.kind == ColumnKind::continuous) {
        const double range = spec.max - spec.min;
        const double diff = range > 0.0 ? (guess.num - truth.num) / range : 0.0;
        se += diff * diff;
        ++report.continuous_cells;
      } else {
        cat_errors += guess.cat != truth.cat;
        ++report.categorical_cells;
      }
    }
  report.empty = report.continuous_cells == 0 && report.categorical_cells == 0;
  report.rmse = report.continuous_cells > 0 ? std::sqrt(se / report.continuous_cells) : 0.0;
  report.categorical_error_rate =
      report.categorical_cells > 0
          ? static_cast<double>(cat_errors) / report.categorical_cells
          : 0.0;
  return report;
}

std::string fidelity_to_text(const FidelityReport& report) {
  std::ostringstream out;
  out << "fidelity composite: " << report.composite << "%\n";
  out << "  column shapes (mean " << report.shape_mean << "):\n";
  for (size_t i = 0; i < report.column_names.size(); ++i)
    out << "    " << report.column_names[i] << ": " << report.shape_scores[i] << "\n";
  out << "  pair trends (mean " << report.trend_mean << "):\n";
  for (size_t i = 0; i < report.pair_names.size(); ++i)
    out << "    " << report.pair_names[i] << ": " << report.trend_scores[i] << "\n";
  return out.str();
}

std::string utility_to_text(const UtilityReport& report) {
  std::ostringstream out;
  if (report.task == TaskKind::regression) {
    out << "utility (regression): rmse " << report.rmse << ", r2 " << report.r2 << "\n";
  } else {
    out << "utility ("
        << (report.task == TaskKind::binary_classification ? "binary" : "multiclass")
        << " classification): accuracy " << report.accuracy << ", f1 " << report.f1
        << ", weighted_f1 " << report.weighted_f1 << ", auroc " << report.auroc << "\n";
  }
  return out.str();
}

std::string imputation_to_text(const ImputationReport& report) {
  std::ostringstream out;
  if (report.empty) return "imputation: no originally-missing cells to score\n";
  out << "imputation: normalized rmse " << report.rmse << " over "
      << report.continuous_cells << " continuous cells, error rate "
      << report.categorical_error_rate << " over " << report.categorical_cells
      << " categorical cells\n";
  return out.str();
}

}  // namespace missdiff
