#include "dephasim/cli/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dephasim/errors.hpp"

namespace dephasim::cli {

std::optional<std::size_t> Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_table(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

void write_table(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_table(out, table);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw DataError("table line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                            " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& c = cells[i];
            if (c == "nan") {
                row[i] = std::nan("");
                continue;
            }
            const auto res = std::from_chars(c.data(), c.data() + c.size(), row[i]);
            if (c.empty() || res.ec != std::errc() || res.ptr != c.data() + c.size()) {
                throw DataError("table line " + std::to_string(line_no) + ": column '" + t.header[i] +
                                "' is not a number: '" + c + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw DataError("table: missing header row");
    return t;
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open table '" + path + "'");
    return read_table(in);
}

}  // namespace dephasim::cli
