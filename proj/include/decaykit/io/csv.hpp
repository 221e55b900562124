// csv.hpp - comma-separated tables with `#` header comments

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decaykit::io {

struct CsvTable {
    std::vector<std::string> comments; // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const; // throws when missing
};

// Each value is written with `precision` significant digits in scientific
// notation; non-finite values as nan / inf / -inf.
void write_csv(std::ostream& out, const CsvTable& table, int precision);
std::string format_value(double v, int precision);

CsvTable read_csv(std::istream& in);

} // namespace decaykit::io
