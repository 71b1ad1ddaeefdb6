#include "missdiff/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace missdiff {

namespace {

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size() && std::isfinite(out);
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      // swallow; \r\n handled by the \n branch
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw std::invalid_argument("csv: unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

Schema infer_schema(const std::string& csv_text) {
  auto rows = parse_csv(csv_text);
  if (rows.empty()) throw std::invalid_argument("csv: empty file");
  const size_t width = rows[0].size();
  for (size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != width)
      throw std::invalid_argument("csv: ragged row " + std::to_string(r));

  Schema schema;
  for (size_t j = 0; j < width; ++j) {
    ColumnSpec spec;
    spec.name = rows[0][j];
    bool any_non_numeric = false;
    bool all_integral = true;
    std::set<std::string> distinct;
    for (size_t r = 1; r < rows.size(); ++r) {
      const std::string& cell = rows[r][j];
      if (cell.empty()) continue;
      double v;
      if (!parse_number(cell, v)) {
        any_non_numeric = true;
        break;
      }
      if (v != std::trunc(v)) all_integral = false;
      distinct.insert(cell);
    }
    const bool low_cardinality_integers =
        !any_non_numeric && all_integral && distinct.size() <= 20;
    spec.kind = (any_non_numeric || low_cardinality_integers) ? ColumnKind::categorical
                                                              : ColumnKind::continuous;
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

Table read_csv_text(const std::string& text, const std::optional<Schema>& schema) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw std::invalid_argument("csv: empty file");
  Table table;
  table.schema = schema ? *schema : infer_schema(text);
  if (rows[0].size() != table.schema.columns.size())
    throw std::invalid_argument("csv: header width does not match schema");
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("csv: ragged row " + std::to_string(r));
    std::vector<Cell> out_row;
    out_row.reserve(rows[r].size());
    for (size_t j = 0; j < rows[r].size(); ++j) {
      const std::string& cell = rows[r][j];
      if (cell.empty()) {
        out_row.push_back(Cell::na());
      } else if (table.schema.columns[j].kind == ColumnKind::continuous) {
        double v;
        if (!parse_number(cell, v))
          throw std::invalid_argument("csv: non-numeric value '" + cell +
                                      "' in continuous column '" +
                                      table.schema.columns[j].name + "'");
        out_row.push_back(Cell::number(v));
      } else {
        out_row.push_back(Cell::category(cell));
      }
    }
    table.rows.push_back(std::move(out_row));
  }
  return table;
}

Table read_csv_file(const std::string& path, const std::optional<Schema>& schema) {
  return read_csv_text(read_text_file(path), schema);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string write_csv_text(const Table& table) {
  std::string out;
  for (size_t j = 0; j < table.schema.columns.size(); ++j) {
    if (j) out += ',';
    const std::string& name = table.schema.columns[j].name;
    out += needs_quoting(name) ? quote(name) : name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      const Cell& c = row[j];
      if (c.is_na()) continue;  // NA writes as an empty field
      if (c.kind == Cell::Kind::number) {
        out += format_double(c.num);
      } else {
        out += needs_quoting(c.cat) ? quote(c.cat) : c.cat;
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv_file(const Table& table, const std::string& path) {
  write_text_file(path, write_csv_text(table));
}

Schema load_schema_json(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (!j.is_array()) throw std::invalid_argument("schema json: array expected");
  Schema schema;
  for (const auto& entry : j) {
    ColumnSpec spec;
    spec.name = entry.at("name").get<std::string>();
    const std::string kind = entry.at("kind").get<std::string>();
    if (kind == "continuous") {
      spec.kind = ColumnKind::continuous;
    } else if (kind == "categorical") {
      spec.kind = ColumnKind::categorical;
    } else {
      throw std::invalid_argument("schema json: unknown kind '" + kind + "'");
    }
    if (entry.contains("categories"))
      spec.categories = entry.at("categories").get<std::vector<std::string>>();
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace missdiff
