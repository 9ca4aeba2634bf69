#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace iconrag {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks; CRLF and LF are both accepted. Rows that are entirely empty are
/// skipped. Throws Error{Format} on an unterminated quote.
std::vector<CsvRow> read_csv(std::istream& in);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

}  // namespace iconrag
