#include "gpk/report.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "gpk/error.hpp"
#include "gpk/format.hpp"

namespace gpk {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string json_value(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no NaN/Inf literals.
    if (!std::isfinite(*d)) return "\"" + format_double(*d) + "\"";
    return format_double(*d);
  }
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&c)) return "\"" + json_escape(*s) + "\"";
  return std::to_string(std::get<std::int64_t>(c));
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return std::to_string(std::get<std::int64_t>(c));
}

void Table::meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw InputError("row width differs from the column count");
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  os << "#";
  for (std::size_t i = 0; i < meta_.size(); ++i) os << (i ? "; " : " ") << meta_[i].first << "=" << meta_[i].second;
  os << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_quote(columns_[i]);
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(cell_text(row[i]));
    os << "\n";
  }
}

void Table::write_json(std::ostream& os) const {
  os << "{\n  \"meta\": {";
  for (std::size_t i = 0; i < meta_.size(); ++i) {
    os << (i ? ", " : "") << "\"" << json_escape(meta_[i].first) << "\": \"" << json_escape(meta_[i].second) << "\"";
  }
  os << "},\n  \"columns\": [";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? ", " : "") << "\"" << json_escape(columns_[i]) << "\"";
  os << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    os << (r ? ",\n    " : "\n    ") << "{";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      os << (i ? ", " : "") << "\"" << json_escape(columns_[i]) << "\": " << json_value(rows_[r][i]);
    }
    os << "}";
  }
  os << (rows_.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_table(const Table& table, const std::string& path, const std::string& format) {
  if (format != "csv" && format != "json") throw InputError("output format must be csv or json");
  auto emit = [&](std::ostream& os) {
    if (format == "csv") {
      table.write_csv(os);
    } else {
      table.write_json(os);
    }
  };
  if (path.empty() || path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + path);
  emit(f);
  if (!f) throw InputError("failed writing " + path);
}

}  // namespace gpk
