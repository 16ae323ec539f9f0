#ifndef RADCLASS_CSV_HPP
#define RADCLASS_CSV_HPP

#include <string>
#include <vector>

namespace radclass::csv {

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

/// RFC-4180 quoting: wrap in quotes when the field contains a comma,
/// quote, or newline; embedded quotes doubled.
std::string escape_field(const std::string& field);

std::string format_row(const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position for a header name; throws SchemaError naming the
    /// column when absent.
    std::size_t column(const std::string& name) const;
};

/// Parses CSV text (CRLF or LF line ends, RFC-4180 quoting). First record
/// is the header; every row must have the same field count.
Table parse(const std::string& text);

Table read_file(const std::string& path);

double parse_double(const std::string& field);
long long parse_int(const std::string& field);

}  // namespace radclass::csv

#endif
