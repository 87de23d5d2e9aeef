#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kinex::io {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 640, height = 420;
};

/// Standalone SVG line plot: axes, a legend, and one polyline per series.
std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts = {});

}  // namespace kinex::io
