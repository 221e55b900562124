// svg.hpp - minimal line plots (polylines, axes, linear or log ticks)

#pragma once

#include <string>
#include <vector>

namespace decaykit::io {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    double width = 720.0;
    double height = 480.0;
};

// Points that are non-finite (or non-positive on a log axis) break the line.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_text_file(const std::string& path, const std::string& text);

} // namespace decaykit::io
