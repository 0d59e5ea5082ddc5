#include "collapse/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "collapse/errors.hpp"

namespace collapse {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

} // namespace

std::string render_line_chart(const CsvTable& table, const PlotSpec& spec) {
    if (table.rows.empty()) throw ValidationError("plot: table has no rows");

    std::size_t xcol = spec.x_column.empty() ? 0 : table.column(spec.x_column);
    std::vector<std::size_t> ycols;
    if (spec.y_columns.empty()) {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (i != xcol) ycols.push_back(i);
    } else {
        for (const std::string& name : spec.y_columns) ycols.push_back(table.column(name));
    }
    if (ycols.empty()) throw ValidationError("plot: no y columns");

    double xmin = table.rows[0][xcol], xmax = xmin;
    double ymin = table.rows[0][ycols[0]], ymax = ymin;
    for (const auto& row : table.rows) {
        xmin = std::min(xmin, row[xcol]);
        xmax = std::max(xmax, row[xcol]);
        for (std::size_t c : ycols) {
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double ml = 64, mr = 16, mt = spec.title.empty() ? 16 : 36, mb = 40;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
       << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << ' '
       << spec.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        os << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

    // axes and ticks
    os << "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n"
       << "<path d=\"M" << fmt(ml) << ' ' << fmt(mt) << " L" << fmt(ml) << ' '
       << fmt(mt + ph) << " L" << fmt(ml + pw) << ' ' << fmt(mt + ph) << "\"/>\n"
       << "</g>\n<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#222\">\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(mt + ph + 14)
           << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py(fy) + 3)
           << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(mt + ph + 30)
       << "\" text-anchor=\"middle\">" << table.header[xcol] << "</text>\n</g>\n";

    for (std::size_t yi = 0; yi < ycols.size(); ++yi) {
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[yi % 8]
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (r) os << ' ';
            os << fmt(px(table.rows[r][xcol])) << ',' << fmt(py(table.rows[r][ycols[yi]]));
        }
        os << "\"/>\n";
        // legend swatch
        double ly = mt + 12 + 14.0 * static_cast<double>(yi);
        os << "<rect x=\"" << fmt(ml + pw - 110) << "\" y=\"" << fmt(ly - 8)
           << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[yi % 8] << "\"/>\n"
           << "<text x=\"" << fmt(ml + pw - 96) << "\" y=\"" << fmt(ly)
           << "\" font-family=\"sans-serif\" font-size=\"10\">" << table.header[ycols[yi]]
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace collapse
