#include "corpusforge/csv.hpp"

#include <charconv>
#include <istream>

namespace corpusforge {

bool CsvReader::next_row(std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  int c;
  while ((c = in_.get()) != std::char_traits<char>::eof()) {
    const char ch = static_cast<char>(c);
    if (!row_started && !in_quotes && ch == '#' && fields.empty() && field.empty()) {
      // comment line
      while ((c = in_.get()) != std::char_traits<char>::eof() && c != '\n') {
      }
      continue;
    }
    row_started = true;
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() || !fields.empty()) {
        fields.push_back(std::move(field));
        return true;
      }
      row_started = false;  // blank line
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!field.empty() || !fields.empty()) {
    fields.push_back(std::move(field));
    return true;
  }
  return false;
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\n\r") != std::string_view::npos ||
      (!field.empty() && field.front() == '#');
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace corpusforge
