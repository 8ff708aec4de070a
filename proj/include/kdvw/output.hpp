#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kdvw {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Shortest text that reads back to the same double.
std::string format_number(double v);

// Named numeric columns.  On disk: '# key = value' metadata lines, a header
// line of column names, then whitespace-separated rows.
struct Table {
  KeyValues meta;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  const std::vector<double>& column(std::string_view name) const;
  bool has(std::string_view name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::string meta_value(std::string_view key) const;
};

void write_table(const std::filesystem::path& path, const Table& t);
Table read_table(const std::filesystem::path& path);

void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);
std::string lookup(const KeyValues& kv, std::string_view key);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace kdvw
