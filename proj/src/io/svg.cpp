#include "kinex/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace kinex::io {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts) {
    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double pw = opts.width - ml - mr, ph = opts.height - mt - mb;
    auto ty = [&](double y) { return opts.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!opts.log_y || y > 0);
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points)
            if (usable(x, y)) {
                x0 = std::min(x0, x), x1 = std::max(x1, x);
                y0 = std::min(y0, ty(y)), y1 = std::max(y1, ty(y));
            }
    if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!opts.title.empty())
        o << "<text x=\"" << opts.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
          << escape(opts.title) << "</text>\n";
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opts.height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(opts.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << escape(opts.y_label) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
        const double yl = opts.log_y ? std::pow(10.0, fy) : fy;
        o << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << mt + ph + 16
          << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx) << "</text>\n"
          << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(mt + (1.0 - k / 4.0) * ph + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yl) << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& [x, y] : series[s].points) {
            if (!usable(x, y)) continue;
            o << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(py(y));
            first = false;
        }
        o << "\"><title>" << escape(series[s].name) << "</title></polyline>\n";
        const double ly = mt + 14 + 16.0 * static_cast<double>(s);
        o << "<line x1=\"" << ml + pw - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 100
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << ml + pw - 96 << "\" y=\"" << ly << "\" font-size=\"11\">"
          << escape(series[s].name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace kinex::io
