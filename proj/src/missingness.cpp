#include "missdiff/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "missdiff/csv.hpp"

namespace missdiff {

namespace {

void require_ratio(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("missing ratio must be in (0,1)");
}

// First k entries of a uniformly random permutation of 0..m-1.
std::vector<int> sample_distinct(int m, int k, Rng& rng) {
  std::vector<int> idx(static_cast<size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(m - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(k));
  return idx;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numeric view of a complete table: continuous cells keep their value,
// categorical cells map to their first-appearance vocabulary index.
std::vector<std::vector<double>> numeric_view(const Table& table) {
  const int n = table.n_rows(), d = table.n_cols();
  std::vector<std::vector<double>> out(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int j = 0; j < d; ++j) {
    std::unordered_map<std::string, int> vocab;
    for (int i = 0; i < n; ++i) {
      const Cell& c = table.at(i, j);
      if (c.is_na())
        throw std::invalid_argument("mask generator requires a complete table");
      if (c.kind == Cell::Kind::number) {
        out[static_cast<size_t>(i)][static_cast<size_t>(j)] = c.num;
      } else {
        auto [it, inserted] = vocab.emplace(c.cat, static_cast<int>(vocab.size()));
        out[static_cast<size_t>(i)][static_cast<size_t>(j)] = it->second;
      }
    }
  }
  return out;
}

}  // namespace

MechanismKind mechanism_from_string(const std::string& name) {
  if (name == "mcar_row") return MechanismKind::mcar_row;
  if (name == "mcar_column") return MechanismKind::mcar_column;
  if (name == "mcar_independent") return MechanismKind::mcar_independent;
  if (name == "mar") return MechanismKind::mar;
  if (name == "nmar") return MechanismKind::nmar;
  throw std::invalid_argument("unknown missing mechanism '" + name + "'");
}

std::string mechanism_to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::mcar_row: return "mcar_row";
    case MechanismKind::mcar_column: return "mcar_column";
    case MechanismKind::mcar_independent: return "mcar_independent";
    case MechanismKind::mar: return "mar";
    case MechanismKind::nmar: return "nmar";
  }
  throw std::logic_error("unreachable");
}

MaskMatrix mask_mcar_row(int n, int d, double alpha, Rng& rng) {
  require_ratio(alpha);
  const int k = static_cast<int>(std::floor(d * alpha));
  if (k >= d) throw std::invalid_argument("mask_mcar_row: floor(d*alpha) must be < d");
  MaskMatrix mask = MaskMatrix::ones(n, d);
  for (int i = 0; i < n; ++i)
    for (int j : sample_distinct(d, k, rng)) mask.set(i, j, 0);
  return mask;
}

MaskMatrix mask_mcar_column(int n, int d, double alpha, Rng& rng) {
  require_ratio(alpha);
  const int k = static_cast<int>(std::floor(n * alpha));
  if (k >= n) throw std::invalid_argument("mask_mcar_column: floor(n*alpha) must be < n");
  MaskMatrix mask = MaskMatrix::ones(n, d);
  for (int j = 0; j < d; ++j)
    for (int i : sample_distinct(n, k, rng)) mask.set(i, j, 0);
  return mask;
}

MaskMatrix mask_mcar_independent(int n, int d, double alpha, Rng& rng) {
  require_ratio(alpha);
  MaskMatrix mask = MaskMatrix::ones(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      if (rng.uniform() < alpha) mask.set(i, j, 0);
  return mask;
}

MaskMatrix mask_logistic(const Table& table, double alpha, double always_observed_fraction,
                         double input_corruption_ratio, Rng& rng) {
  require_ratio(alpha);
  const int n = table.n_rows(), d = table.n_cols();
  if (n == 0) throw std::invalid_argument("mask_logistic: empty table");
  const int s = std::max(1, static_cast<int>(std::ceil(always_observed_fraction * d)));
  if (s >= d)
    throw std::invalid_argument("mask_logistic: no maskable columns left");
  const double target = alpha * d / static_cast<double>(d - s);
  if (target >= 1.0)
    throw std::invalid_argument("mask_logistic: ratio too large for the observed subset");

  const auto values = numeric_view(table);

  // Always-observed subset, then standardized inputs over it.
  const std::vector<int> subset = sample_distinct(d, s, rng);
  std::vector<bool> in_subset(static_cast<size_t>(d), false);
  for (int j : subset) in_subset[static_cast<size_t>(j)] = true;

  std::vector<std::vector<double>> z(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(s), 0.0));
  for (int c = 0; c < s; ++c) {
    const int j = subset[static_cast<size_t>(c)];
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += values[static_cast<size_t>(i)][static_cast<size_t>(j)];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dlt = values[static_cast<size_t>(i)][static_cast<size_t>(j)] - mean;
      var += dlt * dlt;
    }
    var /= n;
    const double sd = std::sqrt(var);
    for (int i = 0; i < n; ++i)
      z[static_cast<size_t>(i)][static_cast<size_t>(c)] =
          sd > 0.0 ? (values[static_cast<size_t>(i)][static_cast<size_t>(j)] - mean) / sd : 0.0;
  }

  // One weight vector per maskable column, drawn in column order.
  std::vector<int> maskable;
  for (int j = 0; j < d; ++j)
    if (!in_subset[static_cast<size_t>(j)]) maskable.push_back(j);
  std::vector<std::vector<double>> w(maskable.size(), std::vector<double>(static_cast<size_t>(s)));
  for (auto& wj : w)
    for (double& v : wj) v = rng.normal();

  // Self-masking corruption of the logistic inputs. The draw happens even at
  // ratio 0 so the plain and self-masking variants consume the same stream.
  // Corrupted standardized entries become 0, the column mean.
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < s; ++c)
      if (rng.uniform() < input_corruption_ratio) z[static_cast<size_t>(i)][static_cast<size_t>(c)] = 0.0;

  std::vector<std::vector<double>> logits(maskable.size(),
                                          std::vector<double>(static_cast<size_t>(n)));
  for (size_t mj = 0; mj < maskable.size(); ++mj)
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int c = 0; c < s; ++c)
        dot += w[mj][static_cast<size_t>(c)] * z[static_cast<size_t>(i)][static_cast<size_t>(c)];
      logits[mj][static_cast<size_t>(i)] = dot;
    }

  // Shared intercept bisected so the mean missing probability over maskable
  // entries hits the target; the mean is increasing in b.
  auto mean_p = [&](double b) {
    double acc = 0.0;
    for (const auto& col : logits)
      for (double v : col) acc += sigmoid(v + b);
    return acc / (static_cast<double>(maskable.size()) * n);
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_p(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double b = 0.5 * (lo + hi);

  MaskMatrix mask = MaskMatrix::ones(n, d);
  for (size_t mj = 0; mj < maskable.size(); ++mj)
    for (int i = 0; i < n; ++i)
      if (rng.uniform() < sigmoid(logits[mj][static_cast<size_t>(i)] + b))
        mask.set(i, maskable[mj], 0);
  return mask;
}

MaskMatrix mask_mar(const Table& table, double alpha, double always_observed_fraction,
                    Rng& rng) {
  return mask_logistic(table, alpha, always_observed_fraction, 0.0, rng);
}

MaskMatrix mask_nmar(const Table& table, double alpha, double always_observed_fraction,
                     Rng& rng) {
  return mask_logistic(table, alpha, always_observed_fraction, alpha, rng);
}

MaskMatrix generate_mask(const MechanismConfig& config, const Table& table, Rng& rng) {
  const int n = table.n_rows(), d = table.n_cols();
  switch (config.kind) {
    case MechanismKind::mcar_row: return mask_mcar_row(n, d, config.ratio, rng);
    case MechanismKind::mcar_column: return mask_mcar_column(n, d, config.ratio, rng);
    case MechanismKind::mcar_independent:
      return mask_mcar_independent(n, d, config.ratio, rng);
    case MechanismKind::mar:
      return mask_mar(table, config.ratio, config.always_observed_fraction, rng);
    case MechanismKind::nmar:
      return mask_nmar(table, config.ratio, config.always_observed_fraction, rng);
  }
  throw std::logic_error("unreachable");
}

Table apply_mask(const Table& table, const MaskMatrix& mask) {
  if (mask.n != table.n_rows() || mask.d != table.n_cols())
    throw std::invalid_argument("apply_mask: dimension mismatch");
  Table out = table;
  for (int i = 0; i < mask.n; ++i)
    for (int j = 0; j < mask.d; ++j)
      if (mask.at(i, j) == 0) out.at(i, j) = Cell::na();
  return out;
}

double mcar_failure_probability_bound(double alpha, int n, int d) {
  require_ratio(alpha);
  if (n < 1 || d < 1) throw std::invalid_argument("bound requires n >= 1, d >= 1");
  const double base = std::max(0.0, (alpha * d - 1.0) / d);
  const double term_row = std::pow(base, n) * d;
  const double term_indep = std::pow(alpha, n) * d;
  const double raw = std::max({term_row, alpha, term_indep});
  return std::clamp(raw, 0.0, 1.0);
}

MissingRateStats missing_rate_stats(const MaskMatrix& mask) {
  if (mask.n == 0 || mask.d == 0)
    throw std::invalid_argument("missing_rate_stats: empty mask");
  MissingRateStats stats;
  stats.per_column.resize(static_cast<size_t>(mask.d), 0.0);
  for (int j = 0; j < mask.d; ++j) {
    int zeros = 0;
    for (int i = 0; i < mask.n; ++i)
      if (mask.at(i, j) == 0) ++zeros;
    stats.per_column[static_cast<size_t>(j)] = static_cast<double>(zeros) / mask.n;
  }
  stats.max_rate = *std::max_element(stats.per_column.begin(), stats.per_column.end());
  stats.max_rate_below_one = stats.max_rate < 1.0;
  return stats;
}

std::string write_mask_csv_text(const MaskMatrix& mask,
                                const std::vector<std::string>& column_names) {
  if (static_cast<int>(column_names.size()) != mask.d)
    throw std::invalid_argument("mask csv: column name count mismatch");
  std::string out;
  for (int j = 0; j < mask.d; ++j) {
    if (j) out += ',';
    out += column_names[static_cast<size_t>(j)];
  }
  out += '\n';
  for (int i = 0; i < mask.n; ++i) {
    for (int j = 0; j < mask.d; ++j) {
      if (j) out += ',';
      out += mask.at(i, j) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void write_mask_csv_file(const MaskMatrix& mask, const std::vector<std::string>& column_names,
                         const std::string& path) {
  write_text_file(path, write_mask_csv_text(mask, column_names));
}

MaskMatrix read_mask_csv_text(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.size() < 2) throw std::invalid_argument("mask csv: no data rows");
  MaskMatrix mask;
  mask.n = static_cast<int>(rows.size()) - 1;
  mask.d = static_cast<int>(rows[0].size());
  mask.m.resize(static_cast<size_t>(mask.n) * mask.d);
  for (int i = 0; i < mask.n; ++i) {
    const auto& row = rows[static_cast<size_t>(i) + 1];
    if (static_cast<int>(row.size()) != mask.d)
      throw std::invalid_argument("mask csv: ragged row");
    for (int j = 0; j < mask.d; ++j) {
      const std::string& cell = row[static_cast<size_t>(j)];
      if (cell == "1") {
        mask.set(i, j, 1);
      } else if (cell == "0") {
        mask.set(i, j, 0);
      } else {
        throw std::invalid_argument("mask csv: entries must be 0 or 1");
      }
    }
  }
  return mask;
}

MaskMatrix read_mask_csv_file(const std::string& path) {
  return read_mask_csv_text(read_text_file(path));
}

}  // namespace missdiff
