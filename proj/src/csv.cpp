#include "csv.hpp"

#include "adipredict/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace adipredict::csv {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void fail(const Row& row, std::size_t column, std::string_view column_name, std::string_view why)
{
    std::ostringstream msg;
    msg << "line " << row.line << ", column " << (column + 1) << " (" << column_name << "): " << why;
    throw Error(ErrorCode::ParseError, msg.str());
}

const std::string& field(const Row& row, std::size_t column, std::string_view column_name)
{
    if (column >= row.fields.size()) {
        fail(row, column, column_name, "missing field");
    }
    return row.fields[column];
}

} // namespace

std::vector<Row> parse(std::string_view text)
{
    std::vector<Row> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto end = text.find('\n');
        auto line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        Row row{line_no, {}};
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            row.fields.emplace_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

double to_double(const Row& row, std::size_t column, std::string_view column_name)
{
    const auto& text = field(row, column, column_name);
    if (text == "NA") {
        return std::nan("");
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(row, column, column_name, "not a number: '" + text + "'");
    }
    return value;
}

int to_int(const Row& row, std::size_t column, std::string_view column_name)
{
    const auto& text = field(row, column, column_name);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        fail(row, column, column_name, "not an integer: '" + text + "'");
    }
    return value;
}

void expect_header(const Row& header, const std::vector<std::string_view>& expected)
{
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= header.fields.size()) {
            fail(header, i, expected[i], "header is missing this column");
        }
        if (header.fields[i] != expected[i]) {
            fail(header, i, expected[i], "unexpected header '" + header.fields[i] + "'");
        }
    }
    if (header.fields.size() > expected.size()) {
        fail(header, expected.size(), header.fields[expected.size()], "unexpected extra column");
    }
}

std::string format_exact(double value)
{
    if (std::isnan(value)) {
        return "NA";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace adipredict::csv
