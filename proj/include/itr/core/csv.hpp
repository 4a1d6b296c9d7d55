#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace itr::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header field, or -1.
    long find(std::string_view name) const;
};

// Reads a comma-separated file with a header row. Quoting is not supported.
// Blank trailing lines are ignored; ragged rows raise IngestionError.
Table read(const std::string& path);
Table parse(std::istream& in);

// Shortest decimal text that parses back to the identical double.
std::string format(double v);

double parse_double(std::string_view text, long row, const std::string& column);
long parse_long(std::string_view text, long row, const std::string& column);

// Joins fields with commas and a trailing newline.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace itr::csv
