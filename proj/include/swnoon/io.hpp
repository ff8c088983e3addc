// Small text/CSV helpers shared by the dataset and CLI emitters. All floats
// are written with %.17g so emitted tables are byte-reproducible and
// round-trip exactly through the readers.
#pragma once

#include <string>
#include <vector>

namespace swnoon {

std::string format_g17(double v);

std::vector<std::string> split(const std::string& line, char sep);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
};

// Parses a simple comma-separated table with one header row.
Table read_table(const std::string& csv_text);

}  // namespace swnoon
