#include "collapse/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "collapse/errors.hpp"

namespace collapse {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ValidationError("csv: no column named '" + name + "'");
}

std::string csv_to_string(const CsvTable& table) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw ValidationError("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

CsvTable csv_from_string(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("csv: empty input");
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    if (t.header.empty()) throw ValidationError("csv: empty header");

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ValidationError("csv: malformed numeric cell '" + cell + "'");
            }
            if (used != cell.size())
                throw ValidationError("csv: malformed numeric cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw ValidationError("csv: row width does not match header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("csv: cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return csv_from_string(os.str());
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string text = csv_to_string(table); // fully rendered before any write
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("csv: cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError("csv: write failed for " + path);
}

} // namespace collapse
