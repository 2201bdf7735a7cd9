#pragma once

// Minimal RFC-4180 reader/writer: quoted fields, doubled quotes, embedded
// newlines, CRLF or LF record separators.

#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wsd/error.hpp"

namespace wsd::csv {

using Record = std::vector<std::string>;

struct ParsedRecord {
  Record fields;
  std::size_t line = 0;  // 1-based physical line where the record starts
};

// Parses the whole stream. Empty physical lines between records are skipped.
inline std::vector<ParsedRecord> read_all(std::istream& in) {
  std::vector<ParsedRecord> out;
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  // Strip a UTF-8 byte-order mark.
  std::string_view s = content;
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);

  std::size_t i = 0;
  std::size_t line = 1;
  while (i < s.size()) {
    if (s[i] == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      ++line;
      i += 2;
      continue;
    }
    ParsedRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      field.clear();
      if (i < s.size() && s[i] == '"') {
        ++i;
        for (;;) {
          if (i >= s.size())
            throw InputError("unterminated quoted field starting at line " +
                             std::to_string(rec.line));
          if (s[i] == '"') {
            if (i + 1 < s.size() && s[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (s[i] == '\n') ++line;
          field.push_back(s[i++]);
        }
        // Tolerate stray characters after a closing quote by appending them.
        while (i < s.size() && s[i] != ',' && s[i] != '\n' && s[i] != '\r')
          field.push_back(s[i++]);
      } else {
        while (i < s.size() && s[i] != ',' && s[i] != '\n' &&
               !(s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n'))
          field.push_back(s[i++]);
      }
      rec.fields.push_back(field);
      if (i >= s.size()) {
        done = true;
      } else if (s[i] == ',') {
        ++i;
      } else if (s[i] == '\n') {
        ++line;
        ++i;
        done = true;
      } else if (s[i] == '\r') {
        ++line;
        i += 2;
        done = true;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos ||
         (!field.empty() && (field.front() == ' ' || field.back() == ' '));
}

inline void write_field(std::ostream& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_record(std::ostream& out, const Record& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace wsd::csv
