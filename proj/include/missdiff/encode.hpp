#pragma once

#include <vector>

#include "missdiff/table.hpp"
#include "missdiff/tensor.hpp"

namespace missdiff {

struct ColumnSpan {
  int start = 0;
  int width = 0;
};

// Numeric view of a table: continuous columns min-max scaled into [0,1],
// categorical columns one-hot with a trailing "missing" slot.
struct EncodedBatch {
  Tensor matrix;                      // [n, D]
  std::vector<ColumnSpan> column_map;  // raw column -> encoded span
};

struct Encoded {
  EncodedBatch batch;
  // Per-cell observedness replicated across each column's encoded span,
  // 1 = observed, same shape as batch.matrix.
  Tensor mask;
};

std::vector<ColumnSpan> column_spans(const Schema& schema);

// Fills min/max (over observed cells) and category vocabularies
// (first-appearance order). Throws if a continuous column has no observed
// cell or the table is empty.
Schema fit_encoder(const Table& table, Schema schema);

// Encoding of observed cells: continuous v -> (v-min)/(max-min) clipped to
// [0,1] (degenerate range -> 0); categorical -> one-hot over the vocabulary.
// Missing cells: continuous -> 0, categorical -> one-hot on the NA slot.
// Unseen categories throw (vocabulary drift).
Encoded encode(const Table& table, const Schema& fitted);

// Inverse map producing a complete table: continuous values are clipped to
// [0,1] and rescaled; categorical blocks go through a row softmax and
// argmax, re-resolved over real categories if the NA slot wins.
Table decode(const Tensor& matrix, const Schema& fitted);

}  // namespace missdiff
