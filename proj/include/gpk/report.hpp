#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gpk {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// A rectangular result set plus ordered metadata. CSV output starts with one
/// `# key=value; ...` line; JSON carries the same fields under "meta".
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void meta(const std::string& key, const std::string& value);
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

std::string cell_text(const Cell& c);

/// Writes to `path`, or stdout when path is empty or "-". format is "csv" or "json".
void write_table(const Table& table, const std::string& path, const std::string& format);

}  // namespace gpk
