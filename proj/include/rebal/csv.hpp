#pragma once

// CSV ingestion and export. Comma separated, header row, '.' decimal
// separator, RFC 4180 quoting.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rebal/dataset.hpp"
#include "rebal/error.hpp"

namespace rebal {

namespace csv {

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format number");
  return std::string(buf, ptr);
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << quote(fields[i]);
  }
  os << '\n';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Reads one logical record (quoted fields may span lines). Returns false at EOF.
inline bool read_record(std::istream& is, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(is, line)) return false;
  ++line_no;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (in_quotes) {
        if (!std::getline(is, line)) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
        ++line_no;
        field += '\n';
        i = 0;
        continue;
      }
      break;
    }
    char c = line[i++];
    if (in_quotes) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return true;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace csv

/// Label column selector: a header name or a 0-based column index.
/// Empty name means "last column".
using LabelColumn = std::variant<std::string, std::size_t>;

inline Dataset read_csv(std::istream& is, const LabelColumn& label_column = std::string{},
                        const std::string& source = "<stream>") {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!csv::read_record(is, header, line_no) || (header.size() == 1 && header[0].empty()))
    throw DataError(source + ": empty file");
  if (header.size() < 2) throw DataError(source + ": need at least one feature column and a label column");

  std::size_t label_idx = header.size() - 1;
  if (const auto* name = std::get_if<std::string>(&label_column); name && !name->empty()) {
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw DataError(source + ": label column '" + *name + "' not found");
    label_idx = static_cast<std::size_t>(it - header.begin());
  } else if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
    if (*idx >= header.size()) throw DataError(source + ": label column index " + std::to_string(*idx) + " out of range");
    label_idx = *idx;
  }

  Dataset d;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label_idx) d.feature_names.push_back(header[j]);
  d.samples = Matrix(0, d.feature_names.size());

  std::vector<std::string> fields;
  std::vector<double> row(d.feature_names.size());
  std::size_t data_row = 0;
  while (csv::read_record(is, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++data_row;
    if (fields.size() != header.size()) {
      throw DataError(source + ": line " + std::to_string(line_no) + " (row " + std::to_string(data_row) + ") has " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(header.size()));
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_idx) continue;
      auto v = csv::parse_number(fields[j]);
      if (!v) {
        throw DataError(source + ": line " + std::to_string(line_no) + " (row " + std::to_string(data_row) +
                        "), column '" + header[j] + "': cannot parse '" + fields[j] + "' as a finite number");
      }
      row[k++] = *v;
    }
    const std::string& label = fields[label_idx];
    int tag = d.label_of(label);
    if (tag < 0) {
      if (d.class_names.size() == 2) {
        throw DataError(source + ": line " + std::to_string(line_no) + " (row " + std::to_string(data_row) +
                        "): label '" + label + "' makes more than two classes");
      }
      d.class_names.push_back(label);
      tag = static_cast<int>(d.class_names.size()) - 1;
    }
    d.samples.append_row(row);
    d.labels.push_back(tag);
  }
  if (d.size() == 0) throw DataError(source + ": no data rows");
  d.validate();
  return d;
}

inline Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column = std::string{}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path.string() + "'");
  return read_csv(in, label_column, path.string());
}

/// Writes features followed by a `label_header` column.
inline void write_csv(std::ostream& os, const Dataset& d, const std::string& label_header = "label") {
  std::vector<std::string> fields = d.feature_names;
  fields.push_back(label_header);
  csv::write_row(os, fields);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.num_features(); ++j) fields[j] = csv::format_number(d.samples(i, j));
    fields.back() = d.class_names[static_cast<std::size_t>(d.labels[i])];
    csv::write_row(os, fields);
  }
}

inline void save_csv(const std::filesystem::path& path, const Dataset& d, const std::string& label_header = "label") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_csv(out, d, label_header);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace rebal
