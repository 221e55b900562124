#include "decaykit/io/csv.hpp"

#include "decaykit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace decaykit::io {

std::size_t CsvTable::column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("csv: no column `" + name + "`");
    return static_cast<std::size_t>(it - columns.begin());
}

std::string format_value(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision - 1, v);
    return buf;
}

void write_csv(std::ostream& out, const CsvTable& table, int precision) {
    if (precision < 6 || precision > 17) throw DomainError("csv: precision must lie in [6, 17]");
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw DomainError("csv: row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i], precision);
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    int number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (!header) {
            t.columns = std::move(fields);
            header = true;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw DomainError("csv line " + std::to_string(number) + ": expected " + std::to_string(t.columns.size()) +
                              " fields");
        std::vector<double> row;
        for (const auto& s : fields) {
            if (s == "nan") row.push_back(std::numeric_limits<double>::quiet_NaN());
            else if (s == "inf") row.push_back(std::numeric_limits<double>::infinity());
            else if (s == "-inf") row.push_back(-std::numeric_limits<double>::infinity());
            else {
                char* end = nullptr;
                const double v = std::strtod(s.c_str(), &end);
                if (s.empty() || *end != '\0')
                    throw DomainError("csv line " + std::to_string(number) + ": bad number `" + s + "`");
                row.push_back(v);
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (!header) throw DomainError("csv: missing header row");
    return t;
}

} // namespace decaykit::io
