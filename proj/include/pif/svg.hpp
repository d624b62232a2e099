#ifndef PIF_SVG_HPP
#define PIF_SVG_HPP

#include <string>
#include <utility>
#include <vector>

namespace pif {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

// Static line chart with axes and a legend, one polyline per series.
std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& x_label,
                           const std::string& y_label);

// Score heatmap over scattered 2D sample positions (rendered as small
// colored squares, blue = low, red = high).
std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& value);

}  // namespace pif

#endif
