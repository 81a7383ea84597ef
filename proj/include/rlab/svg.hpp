#pragma once

#include <string>
#include <vector>

namespace rlab {

/// Minimal static SVG line chart: one polyline per series with an optional
/// translucent +-band polygon. Pure text output, no external renderer.
struct SvgSeries {
    std::string label;
    std::string color = "#1f6fb4";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> band;  // half-width of the band at each point; may be empty
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 440;
    bool log_x = false;
    std::vector<SvgSeries> series;

    std::string render() const;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rlab
