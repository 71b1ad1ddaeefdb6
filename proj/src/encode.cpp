#include "missdiff/encode.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace missdiff {

std::vector<ColumnSpan> column_spans(const Schema& schema) {
  std::vector<ColumnSpan> spans;
  int offset = 0;
  for (const ColumnSpec& c : schema.columns) {
    spans.push_back({offset, c.encoded_width()});
    offset += c.encoded_width();
  }
  return spans;
}

Schema fit_encoder(const Table& table, Schema schema) {
  if (table.n_rows() == 0) throw std::invalid_argument("fit_encoder: empty table");
  for (int j = 0; j < schema.n_cols(); ++j) {
    ColumnSpec& spec = schema.columns[static_cast<size_t>(j)];
    if (spec.kind == ColumnKind::continuous) {
      bool any = false;
      double mn = 0.0, mx = 0.0;
      for (int i = 0; i < table.n_rows(); ++i) {
        const Cell& c = table.at(i, j);
        if (c.is_na()) continue;
        if (!any) {
          mn = mx = c.num;
          any = true;
        } else {
          mn = std::min(mn, c.num);
          mx = std::max(mx, c.num);
        }
      }
      if (!any)
        throw std::invalid_argument("fit_encoder: continuous column '" + spec.name +
                                    "' has no observed cells");
      spec.min = mn;
      spec.max = mx;
    } else {
      spec.categories.clear();
      std::unordered_map<std::string, bool> seen;
      for (int i = 0; i < table.n_rows(); ++i) {
        const Cell& c = table.at(i, j);
        if (c.is_na()) continue;
        if (seen.emplace(c.cat, true).second) spec.categories.push_back(c.cat);
      }
    }
    spec.fitted = true;
  }
  return schema;
}

Encoded encode(const Table& table, const Schema& fitted) {
  for (const ColumnSpec& c : fitted.columns)
    if (!c.fitted) throw std::invalid_argument("encode: schema not fitted");
  table.validate();
  const auto spans = column_spans(fitted);
  const int64_t n = table.n_rows();
  const int64_t width = fitted.encoded_width();

  Encoded out;
  out.batch.matrix = Tensor::zeros({n, width});
  out.batch.column_map = spans;
  out.mask = Tensor::zeros({n, width});

  for (int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < fitted.n_cols(); ++j) {
      const ColumnSpec& spec = fitted.columns[static_cast<size_t>(j)];
      const ColumnSpan span = spans[static_cast<size_t>(j)];
      const Cell& cell = table.at(static_cast<int>(i), j);
      const float observed = cell.is_na() ? 0.0f : 1.0f;
      for (int k = 0; k < span.width; ++k)
        out.mask.at(i, span.start + k) = observed;

      if (spec.kind == ColumnKind::continuous) {
        double v = 0.0;  // missing encodes as 0
        if (!cell.is_na()) {
          const double range = spec.max - spec.min;
          v = range > 0.0 ? (cell.num - spec.min) / range : 0.0;
          v = std::clamp(v, 0.0, 1.0);
        }
        out.batch.matrix.at(i, span.start) = static_cast<float>(v);
      } else {
        int hot = span.width - 1;  // NA slot is last
        if (!cell.is_na()) {
          const auto it =
              std::find(spec.categories.begin(), spec.categories.end(), cell.cat);
          if (it == spec.categories.end())
            throw std::invalid_argument("encode: unseen category '" + cell.cat +
                                        "' in column '" + spec.name + "'");
          hot = static_cast<int>(it - spec.categories.begin());
        }
        out.batch.matrix.at(i, span.start + hot) = 1.0f;
      }
    }
  }
  return out;
}

Table decode(const Tensor& matrix, const Schema& fitted) {
  const auto spans = column_spans(fitted);
  if (matrix.shape.size() != 2 || matrix.shape[1] != fitted.encoded_width())
    throw std::invalid_argument("decode: matrix width does not match schema");
  Table table;
  table.schema = fitted;
  const int64_t n = matrix.shape[0];
  for (int64_t i = 0; i < n; ++i) {
    std::vector<Cell> row;
    row.reserve(fitted.columns.size());
    for (int j = 0; j < fitted.n_cols(); ++j) {
      const ColumnSpec& spec = fitted.columns[static_cast<size_t>(j)];
      const ColumnSpan span = spans[static_cast<size_t>(j)];
      if (spec.kind == ColumnKind::continuous) {
        double v = std::clamp(static_cast<double>(matrix.at(i, span.start)), 0.0, 1.0);
        row.push_back(Cell::number(v * (spec.max - spec.min) + spec.min));
      } else {
        if (spec.categories.empty())
          throw std::invalid_argument("decode: column '" + spec.name +
                                      "' has an empty vocabulary");
        Tensor block = Tensor::zeros({1, span.width});
        for (int k = 0; k < span.width; ++k) block.at(0, k) = matrix.at(i, span.start + k);
        const Tensor probs = kernels::softmax_rows(block);
        int best = 0;
        for (int k = 1; k < span.width; ++k)
          if (probs.at(0, k) > probs.at(0, best)) best = k;
        if (best == span.width - 1) {
          // NA slot won; generated rows must be complete, so fall back to
          // the best real category.
          best = 0;
          for (int k = 1; k < span.width - 1; ++k)
            if (probs.at(0, k) > probs.at(0, best)) best = k;
        }
        row.push_back(Cell::category(spec.categories[static_cast<size_t>(best)]));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace missdiff
