#include "missdiff/table.hpp"

#include <cmath>
#include <stdexcept>

namespace missdiff {

Cell Cell::number(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("number cell must be finite");
  return Cell{Kind::number, v, {}};
}

int Schema::encoded_width() const {
  int w = 0;
  for (const ColumnSpec& c : columns) w += c.encoded_width();
  return w;
}

int Schema::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return static_cast<int>(i);
  return -1;
}

void Table::validate() const {
  for (const auto& row : rows) {
    if (row.size() != schema.columns.size())
      throw std::invalid_argument("table row width does not match schema");
    for (size_t j = 0; j < row.size(); ++j) {
      const Cell& c = row[j];
      if (c.is_na()) continue;
      const bool numeric = c.kind == Cell::Kind::number;
      if (numeric != (schema.columns[j].kind == ColumnKind::continuous))
        throw std::invalid_argument("cell kind does not match column '" +
                                    schema.columns[j].name + "'");
      if (numeric && !std::isfinite(c.num))
        throw std::invalid_argument("non-finite number in column '" +
                                    schema.columns[j].name + "'");
    }
  }
}

}  // namespace missdiff
