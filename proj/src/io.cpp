#include "swnoon/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace swnoon {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::invalid_argument("table has no column: " + name);
}

Table read_table(const std::string& csv_text) {
    Table t;
    std::istringstream is(csv_text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) {
                throw std::invalid_argument("csv row width mismatch: " + line);
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw std::invalid_argument("csv: empty table");
    return t;
}

}  // namespace swnoon
