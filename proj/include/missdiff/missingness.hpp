#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "missdiff/rng.hpp"
#include "missdiff/table.hpp"

namespace missdiff {

// Per-cell observedness over raw columns: 1 = observed, 0 = missing.
struct MaskMatrix {
  int n = 0;
  int d = 0;
  std::vector<uint8_t> m;

  static MaskMatrix ones(int n, int d) {
    return MaskMatrix{n, d, std::vector<uint8_t>(static_cast<size_t>(n) * d, 1)};
  }
  uint8_t at(int i, int j) const { return m[static_cast<size_t>(i) * d + j]; }
  void set(int i, int j, uint8_t v) { m[static_cast<size_t>(i) * d + j] = v; }
};

enum class MechanismKind { mcar_row, mcar_column, mcar_independent, mar, nmar };

struct MechanismConfig {
  MechanismKind kind = MechanismKind::mcar_independent;
  double ratio = 0.2;  // missing ratio, in (0,1)
  // MAR/NMAR: fraction of columns that can never go missing (at least one).
  double always_observed_fraction = 0.3;
};

MechanismKind mechanism_from_string(const std::string& name);
std::string mechanism_to_string(MechanismKind kind);

// Exactly floor(d*alpha) missing cells per row, positions uniform.
MaskMatrix mask_mcar_row(int n, int d, double alpha, Rng& rng);
// Exactly floor(n*alpha) missing cells per column, rows uniform.
MaskMatrix mask_mcar_column(int n, int d, double alpha, Rng& rng);
// Every cell independently missing with probability alpha.
MaskMatrix mask_mcar_independent(int n, int d, double alpha, Rng& rng);

// Mask driven by a logistic model over a random always-observed column
// subset: weights are standard normal per maskable column, and a shared
// intercept is bisected so the expected overall missing fraction equals
// alpha. The table must be complete. For the self-masking variant the
// logistic inputs are first corrupted cell-wise with probability
// input_corruption_ratio (corrupted entries become the column mean).
MaskMatrix mask_logistic(const Table& table, double alpha, double always_observed_fraction,
                         double input_corruption_ratio, Rng& rng);

MaskMatrix mask_mar(const Table& table, double alpha, double always_observed_fraction,
                    Rng& rng);
MaskMatrix mask_nmar(const Table& table, double alpha, double always_observed_fraction,
                     Rng& rng);

MaskMatrix generate_mask(const MechanismConfig& config, const Table& table, Rng& rng);

// Cells with mask 0 become NA; everything else is copied through.
Table apply_mask(const Table& table, const MaskMatrix& mask);

// Upper bound on the probability that the per-column missing rates fail to
// stay below one under the MCAR mechanisms at ratio alpha:
// max{(max(0, (alpha*d-1)/d))^n * d, alpha, alpha^n * d}, clamped to [0,1].
double mcar_failure_probability_bound(double alpha, int n, int d);

struct MissingRateStats {
  std::vector<double> per_column;  // fraction of zeros per column
  double max_rate = 0.0;
  bool max_rate_below_one = true;
};

MissingRateStats missing_rate_stats(const MaskMatrix& mask);

// Mask export/import: CSV of 0/1 integers with a header row.
std::string write_mask_csv_text(const MaskMatrix& mask,
                                const std::vector<std::string>& column_names);
void write_mask_csv_file(const MaskMatrix& mask, const std::vector<std::string>& column_names,
                         const std::string& path);
MaskMatrix read_mask_csv_text(const std::string& text);
MaskMatrix read_mask_csv_file(const std::string& path);

}  // namespace missdiff
