#include "prorl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace prorl {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double value, bool log_axis) {
    char buf[32];
    if (log_axis)
        std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(value)));
    else
        std::snprintf(buf, sizeof buf, "%.3g", value);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& options) {
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;

    auto tx = [&](double x) { return options.log_x ? std::log10(x) : x; };
    auto ty = [&](double y) { return options.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!options.log_x || x > 0) && (!options.log_y || y > 0);
    };

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                x_lo = std::min(x_lo, tx(s.x[i]));
                x_hi = std::max(x_hi, tx(s.x[i]));
                y_lo = std::min(y_lo, ty(s.y[i]));
                y_hi = std::max(y_hi, ty(s.y[i]));
            }
    if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto px = [&](double x) { return left + (tx(x) - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(left) << "\" y=\"24\" font-size=\"15\">" << escape(options.title) << "</text>\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
        << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double fx = x_lo + (x_hi - x_lo) * k / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * k / 4.0;
        const double sx = left + plot_w * k / 4.0;
        const double sy = top + plot_h * (1.0 - k / 4.0);
        out << "<line x1=\"" << num(sx) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(sx) << "\" y2=\""
            << num(top + plot_h + 5) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << num(sx) << "\" y=\"" << num(top + plot_h + 18) << "\" text-anchor=\"middle\">"
            << tick_label(fx, options.log_x) << "</text>\n";
        out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy) << "\" x2=\"" << num(left) << "\" y2=\""
            << num(sy) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">"
            << tick_label(fy, options.log_y && std::abs(fy - std::round(fy)) < 1e-9) << "</text>\n";
    }
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 10.0)
        << "\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << num(top + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(options.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
        std::ostringstream points;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i])) points << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points.str()
            << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i]))
                out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\""
                    << color << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(k) + 8.0;
        out << "<line x1=\"" << num(left + plot_w + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(left + plot_w + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(left + plot_w + 34) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace prorl
