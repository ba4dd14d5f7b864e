#ifndef SPECMKT_CSV_HPP
#define SPECMKT_CSV_HPP

// Plain numeric CSV emission with shortest-round-trip formatting, so that a
// rerun with the same inputs reproduces the file byte for byte.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "specmkt/errors.hpp"

namespace specmkt {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw error("csv row has " + std::to_string(row.size()) + " cells, expected " +
                  std::to_string(table.columns.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c]))
        throw error("nonfinite value in csv column '" + table.columns[c] + "'");
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

/// Write to a file, or to stdout when the path is "-".
inline void write_csv(const Table& table, const std::filesystem::path& path) {
  const std::string text = to_csv(table);
  if (path == "-") {
    std::cout << text;
    if (!std::cout) throw io_error("failed writing csv to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open output file " + path.string());
  out << text;
  if (!out) throw io_error("failed writing " + path.string());
}

}  // namespace specmkt

#endif  // SPECMKT_CSV_HPP
