#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace missdiff {

enum class ColumnKind { continuous, categorical };

// One table cell: a finite number, a category label, or a missing value.
struct Cell {
  enum class Kind { number, category, na };

  Kind kind = Kind::na;
  double num = 0.0;
  std::string cat;

  static Cell number(double v);
  static Cell category(std::string v) { return Cell{Kind::category, 0.0, std::move(v)}; }
  static Cell na() { return Cell{}; }

  bool is_na() const { return kind == Kind::na; }
  bool operator==(const Cell& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::number) return num == o.num;
    if (kind == Kind::category) return cat == o.cat;
    return true;
  }
};

// Column declaration plus encoder statistics once fitted. Categorical
// columns carry an implicit extra one-hot slot for "missing", always last.
struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  bool fitted = false;
  double min = 0.0;  // continuous, over observed cells
  double max = 0.0;
  std::vector<std::string> categories;  // categorical, first-appearance order

  int encoded_width() const {
    return kind == ColumnKind::continuous ? 1 : static_cast<int>(categories.size()) + 1;
  }
};

struct Schema {
  std::vector<ColumnSpec> columns;

  int n_cols() const { return static_cast<int>(columns.size()); }
  int encoded_width() const;
  int column_index(const std::string& name) const;  // -1 if absent
};

struct Table {
  Schema schema;
  std::vector<std::vector<Cell>> rows;

  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_cols() const { return schema.n_cols(); }
  const Cell& at(int i, int j) const { return rows[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  Cell& at(int i, int j) { return rows[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

  // Checks every cell's kind against its column and numbers for finiteness.
  void validate() const;
};

}  // namespace missdiff
