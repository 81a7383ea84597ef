#include "rlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rlab {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string SvgChart::render() const {
    const double margin_left = 70, margin_right = 20, margin_top = 40,
                 margin_bottom = 55;
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const SvgSeries& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double xv = log_x ? std::log2(s.x[i]) : s.x[i];
            const double half = i < s.band.size() ? s.band[i] : 0.0;
            if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xmin = xmax = xv;
                ymin = s.y[i] - half;
                ymax = s.y[i] + half;
                first = false;
            } else {
                xmin = std::min(xmin, xv);
                xmax = std::max(xmax, xv);
                ymin = std::min(ymin, s.y[i] - half);
                ymax = std::max(ymax, s.y[i] + half);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        const double v = log_x ? std::log2(x) : x;
        return margin_left + (v - xmin) / (xmax - xmin) * plot_w;
    };
    auto py = [&](double y) {
        return margin_top + (ymax - y) / (ymax - ymin) * plot_h;
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // frame and tick labels
    out << "  <rect x=\"" << fmt(margin_left) << "\" y=\"" << fmt(margin_top)
        << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fy = ymin + (ymax - ymin) * i / ticks;
        const double yy = py(fy);
        out << "  <line x1=\"" << fmt(margin_left - 4) << "\" y1=\"" << fmt(yy)
            << "\" x2=\"" << fmt(margin_left) << "\" y2=\"" << fmt(yy)
            << "\" stroke=\"#444444\"/>\n";
        out << "  <text x=\"" << fmt(margin_left - 8) << "\" y=\"" << fmt(yy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << fmt(fy) << "</text>\n";
    }
    if (!series.empty() && !series.front().x.empty()) {
        for (double xv : series.front().x) {
            out << "  <line x1=\"" << fmt(px(xv)) << "\" y1=\""
                << fmt(margin_top + plot_h) << "\" x2=\"" << fmt(px(xv))
                << "\" y2=\"" << fmt(margin_top + plot_h + 4)
                << "\" stroke=\"#444444\"/>\n";
            out << "  <text x=\"" << fmt(px(xv)) << "\" y=\""
                << fmt(margin_top + plot_h + 18)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"11\">" << fmt(xv) << "</text>\n";
        }
    }
    out << "  <text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" << x_label << "</text>\n";
    out << "  <text x=\"16\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 " << height / 2 << ")\">"
        << y_label << "</text>\n";

    int legend_row = 0;
    for (const SvgSeries& s : series) {
        std::vector<std::size_t> ok;  // nonfinite points are dropped
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]) &&
                (s.band.empty() || std::isfinite(s.band[i]))) {
                ok.push_back(i);
            }
        }
        if (!s.band.empty() && !ok.empty()) {
            std::ostringstream pts;
            for (std::size_t i : ok) {
                pts << fmt(px(s.x[i])) << "," << fmt(py(s.y[i] + s.band[i])) << " ";
            }
            for (std::size_t k = ok.size(); k-- > 0;) {
                const std::size_t i = ok[k];
                pts << fmt(px(s.x[i])) << "," << fmt(py(s.y[i] - s.band[i]));
                if (k > 0) pts << " ";
            }
            out << "  <polygon points=\"" << pts.str() << "\" fill=\"" << s.color
                << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }
        std::ostringstream pts;
        for (std::size_t k = 0; k < ok.size(); ++k) {
            pts << fmt(px(s.x[ok[k]])) << "," << fmt(py(s.y[ok[k]]));
            if (k + 1 < ok.size()) pts << " ";
        }
        out << "  <polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
            << s.color << "\" stroke-width=\"1.8\"/>\n";
        for (std::size_t i : ok) {
            out << "  <circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\""
                << fmt(py(s.y[i])) << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
        }
        const double ly = margin_top + 14 + 16 * legend_row++;
        out << "  <line x1=\"" << fmt(margin_left + 10) << "\" y1=\"" << fmt(ly)
            << "\" x2=\"" << fmt(margin_left + 34) << "\" y2=\"" << fmt(ly)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"/>\n";
        out << "  <text x=\"" << fmt(margin_left + 40) << "\" y=\"" << fmt(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace rlab
