#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dephasim::cli {

/// Numeric comma-separated table with a single header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const;
};

/// Values are written with 17 significant digits so they read back exactly.
void write_table(std::ostream& out, const Table& table);
void write_table(const std::string& path, const Table& table);

/// Throws DataError naming the offending line on malformed input.
Table read_table(std::istream& in);
Table read_table(const std::string& path);

std::string format_double(double v);

}  // namespace dephasim::cli
