#pragma once

// Minimal comma-separated reader shared by the metadata, dataset and report
// loaders. Fields are not quoted in any of our formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace adipredict::csv {

struct Row {
    std::size_t line = 0; // 1-based line number in the source
    std::vector<std::string> fields;
};

/// Splits text into rows, skipping blank lines and lines starting with '#'.
/// Trailing '\r' and surrounding whitespace of each field are removed.
std::vector<Row> parse(std::string_view text);

std::string read_file(const std::string& path);

/// Strict numeric conversions; throw ParseError mentioning line and column.
double to_double(const Row& row, std::size_t column, std::string_view column_name);
int to_int(const Row& row, std::size_t column, std::string_view column_name);

/// Throws ParseError unless `header` matches `expected` exactly.
void expect_header(const Row& header, const std::vector<std::string_view>& expected);

/// %.17g, which round-trips every finite double.
std::string format_exact(double value);

} // namespace adipredict::csv
