#pragma once

#include <string>
#include <vector>

#include "collapse/csv.hpp"

namespace collapse {

// Self-contained deterministic SVG line chart: one polyline per y column.
struct PlotSpec {
    std::string x_column;                // empty = first column
    std::vector<std::string> y_columns;  // empty = all remaining columns
    int width = 720;
    int height = 480;
    std::string title;
};

std::string render_line_chart(const CsvTable& table, const PlotSpec& spec);

} // namespace collapse
