#include "pif/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pif/common.hpp"

namespace pif {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 140;
constexpr int kMarginTop = 20;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& x_label,
                           const std::string& y_label) {
    if (series.empty()) throw ConfigError("svg: no series to plot");
    double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            lox = std::min(lox, x);
            hix = std::max(hix, x);
            loy = std::min(loy, y);
            hiy = std::max(hiy, y);
        }
    if (lox > hix) throw ConfigError("svg: series contain no points");
    if (hix == lox) hix = lox + 1.0;
    if (hiy == loy) hiy = loy + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - lox) / (hix - lox) * plot_w; };
    auto py = [&](double y) { return kMarginTop + (1.0 - (y - loy) / (hiy - loy)) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
       << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
       << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double fx = lox + (hix - lox) * i / 5.0;
        double fy = loy + (hiy - loy) * i / 5.0;
        os << "<text x=\"" << px(fx) << "\" y=\"" << kMarginTop + plot_h + 16
           << "\" text-anchor=\"middle\">" << num(std::round(fx * 100) / 100) << "</text>\n";
        os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\">" << num(std::round(fy * 1000) / 1000) << "</text>\n";
    }
    os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"14\" y=\"" << kMarginTop + plot_h / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kMarginTop + plot_h / 2
       << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % 10];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (auto [x, y] : series[si].points) os << px(x) << "," << py(y) << " ";
        os << "\"/>\n";
        double ly = kMarginTop + 14.0 * double(si) + 10.0;
        os << "<line x1=\"" << kMarginLeft + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
           << kMarginLeft + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"1.8\"/>\n";
        os << "<text x=\"" << kMarginLeft + plot_w + 34 << "\" y=\"" << ly + 4 << "\">"
           << series[si].name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& value) {
    if (x.size() != y.size() || x.size() != value.size())
        throw DimensionMismatch("svg_heatmap: coordinate/value length mismatch");
    if (x.empty()) throw ConfigError("svg_heatmap: no points");

    double lox = x[0], hix = x[0], loy = y[0], hiy = y[0], lov = value[0], hiv = value[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        lox = std::min(lox, x[i]);
        hix = std::max(hix, x[i]);
        loy = std::min(loy, y[i]);
        hiy = std::max(hiy, y[i]);
        lov = std::min(lov, value[i]);
        hiv = std::max(hiv, value[i]);
    }
    if (hix == lox) hix = lox + 1.0;
    if (hiy == loy) hiy = loy + 1.0;
    if (hiv == lov) hiv = lov + 1.0;

    const double size = 560.0;
    auto px = [&](double v) { return 20.0 + (v - lox) / (hix - lox) * size; };
    auto py = [&](double v) { return 20.0 + (1.0 - (v - loy) / (hiy - loy)) * size; };
    // cell edge from the sample density, assuming a roughly regular grid
    double cell = size / std::max(2.0, std::sqrt(double(x.size())));

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        double tnorm = (value[i] - lov) / (hiv - lov);
        int r = int(std::lround(255.0 * tnorm));
        int b = 255 - r;
        os << "<rect x=\"" << px(x[i]) - cell / 2 << "\" y=\"" << py(y[i]) - cell / 2
           << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ",60,"
           << b << ")\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace pif
