#pragma once

#include <string>
#include <vector>

namespace collapse {

// Comma-separated, header row, '.' decimal, %.17g round-trip formatting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const; // throws if absent
};

std::string csv_to_string(const CsvTable& table);
CsvTable csv_from_string(const std::string& text);

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

std::string format_double(double v);

} // namespace collapse
