#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace authentext::csv {

struct Record {
  std::size_t line = 0;  // 1-based line on which the record starts
  std::vector<std::string> fields;
};

/// RFC-4180 reader: comma separator, double-quote quoting with "" escapes,
/// CRLF or LF record terminators, embedded newlines inside quoted fields.
/// Blank lines are skipped. Throws Error(parse) naming the line.
std::vector<Record> parse(std::string_view data);

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

}  // namespace authentext::csv
