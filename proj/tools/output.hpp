#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "config.hpp"

namespace pinlab::app {

using Cell = std::variant<double, long long, std::string>;

/// One emitted data file. Metadata lines precede the column header in CSV
/// and become a "meta" object in JSON.
struct Table {
  std::string name;
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Shortest round-trip text for a double; "inf", "-inf" and "nan" for the rest.
std::string format_number(double x);

std::string to_csv(const Table& t, const std::string& timestamp);
std::string to_json(const Table& t, const std::string& timestamp);

/// Writes <dir>/<name>.csv or .json and returns the path.
std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, Format format);

/// True when the two files agree after dropping the timestamp line.
bool same_data(const std::filesystem::path& a, const std::filesystem::path& b);

std::string utc_timestamp();

}  // namespace pinlab::app
