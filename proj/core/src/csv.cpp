#include "authentext/csv.hpp"

#include "authentext/error.hpp"

namespace authentext::csv {

std::vector<Record> parse(std::string_view data) {
  std::vector<Record> records;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = data.size();

  while (i < n) {
    // Skip blank lines between records.
    if (data[i] == '\n') {
      ++i, ++line;
      continue;
    }
    if (data[i] == '\r' && i + 1 < n && data[i + 1] == '\n') {
      i += 2, ++line;
      continue;
    }

    Record record;
    record.line = line;
    bool end_of_record = false;
    while (!end_of_record) {
      std::string field;
      if (i < n && data[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          const char c = data[i];
          if (c == '"') {
            if (i + 1 < n && data[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
          }
        }
        if (!closed) {
          throw Error(ErrorCode::parse, "unterminated quoted field starting at line " +
                                            std::to_string(record.line));
        }
        if (i < n && data[i] != ',' && data[i] != '\n' &&
            !(data[i] == '\r' && i + 1 < n && data[i + 1] == '\n')) {
          throw Error(ErrorCode::parse,
                      "unexpected character after closing quote at line " + std::to_string(line));
        }
      } else {
        while (i < n && data[i] != ',' && data[i] != '\n' &&
               !(data[i] == '\r' && i + 1 < n && data[i + 1] == '\n')) {
          if (data[i] == '"') {
            throw Error(ErrorCode::parse,
                        "quote inside unquoted field at line " + std::to_string(line));
          }
          field.push_back(data[i]);
          ++i;
        }
      }
      record.fields.push_back(std::move(field));

      if (i >= n) {
        end_of_record = true;
      } else if (data[i] == ',') {
        ++i;
      } else if (data[i] == '\n') {
        ++i, ++line;
        end_of_record = true;
      } else {  // CRLF
        i += 2, ++line;
        end_of_record = true;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace authentext::csv
