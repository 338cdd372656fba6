#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

// Minimal RFC-4180-style csv: quoted fields may contain commas, quotes
// (doubled) and newlines. Lines starting with '#' outside a quoted field are
// treated as comments and skipped by the reader.

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next row into `fields`; returns false at end of input.
  bool next_row(std::vector<std::string>& fields);

 private:
  std::istream& in_;
};

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace corpusforge
