#include "itr/core/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "itr/core/error.hpp"

namespace itr::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
        std::size_t lead = 0;
        while (lead < f.size() && (f[lead] == ' ' || f[lead] == '\t')) ++lead;
        f.erase(0, lead);
    }
    return out;
}

}  // namespace

long Table::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<long>(i);
    return -1;
}

Table parse(std::istream& in) {
    Table t;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw IngestionError("expected " + std::to_string(t.header.size()) + " fields, found " +
                                     std::to_string(fields.size()),
                                 static_cast<long>(t.rows.size()) + 1);
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) throw IngestionError("empty file: no header row");
    return t;
}

Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open '" + path + "'");
    return parse(in);
}

std::string format(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, long row, const std::string& column) {
    if (text.empty() || text == "NA" || text == "NaN" || text == "nan")
        throw IngestionError("missing value", row, column);
    double v = 0.0;
    const char* first = text.data();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw IngestionError("not a number: '" + std::string(text) + "'", row, column);
    return v;
}

long parse_long(std::string_view text, long row, const std::string& column) {
    const double v = parse_double(text, row, column);
    const long k = static_cast<long>(v);
    if (static_cast<double>(k) != v)
        throw IngestionError("expected an integer: '" + std::string(text) + "'", row, column);
    return k;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

}  // namespace itr::csv
