#pragma once

#include <optional>
#include <string>
#include <vector>

#include "missdiff/table.hpp"

namespace missdiff {

// RFC-4180 style parsing: quoted fields may contain commas, newlines and
// doubled quotes; a header row is required; an empty field reads as NA.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Infers a schema from raw CSV text. A column is categorical iff any
// non-empty cell fails numeric parsing, or it has at most 20 distinct values
// and every value is integral. Columns with no observed cells fall out as
// categorical with an empty vocabulary.
Schema infer_schema(const std::string& csv_text);

// Reads a table, inferring the schema unless one is supplied. With an
// explicit schema, cells are parsed according to the declared kinds.
Table read_csv_text(const std::string& text, const std::optional<Schema>& schema = {});
Table read_csv_file(const std::string& path, const std::optional<Schema>& schema = {});

std::string write_csv_text(const Table& table);
void write_csv_file(const Table& table, const std::string& path);

// Schema override file: JSON array of {name, kind, categories?} entries.
Schema load_schema_json(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace missdiff
