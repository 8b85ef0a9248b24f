#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ctox {

// Minimal RFC-4180-style CSV, single-line records. Fields containing
// commas, quotes, or whitespace padding are quoted on write; quoted fields
// are unescaped on read.

std::vector<std::string> split_csv_line(const std::string& line);

std::string join_csv_line(const std::vector<std::string>& fields);

// Streams a CSV file with a mandatory header. `expected_header` is matched
// exactly; the callback receives (1-based line number, fields). Throws
// ParseError on missing file, wrong header, or a row with the wrong field
// count.
void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& expected_header,
    const std::function<void(size_t, const std::vector<std::string>&)>& row_fn);

}  // namespace ctox
