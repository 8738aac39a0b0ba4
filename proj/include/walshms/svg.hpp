#pragma once

#include <string>
#include <utility>
#include <vector>

namespace walshms {

/// Minimal self-contained SVG line plot: axes, ticks, legend, one polyline
/// per series. The CSV is the authoritative output; this is for quick looks.
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace walshms
