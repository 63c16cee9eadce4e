#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace qperc {

// Minimal line/band chart writer; enough for sweep summaries without any
// external plotting dependency.
class svg_chart {
public:
    svg_chart(std::string title, std::string x_label, std::string y_label, int width = 720, int height = 480)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
          width_(width), height_(height) {}

    void add_series(std::string name, std::vector<std::pair<double, double>> points, std::string color,
                    bool dashed = false) {
        series_.push_back({std::move(name), std::move(points), std::move(color), dashed});
    }

    // Vertical band: (x, y_low, y_high) triples.
    void add_band(std::vector<std::tuple<double, double, double>> band, std::string color) {
        bands_.push_back({std::move(band), std::move(color)});
    }

    void write(std::ostream& os) const {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        auto stretch = [&](double x, double y) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        };
        for (const auto& s : series_)
            for (auto [x, y] : s.points) stretch(x, y);
        for (const auto& b : bands_)
            for (auto [x, lo, hi] : b.points) {
                stretch(x, lo);
                stretch(x, hi);
            }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
            ymin = 0;
            ymax = 1;
        }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;

        const double L = 70, R = 20, T = 40, B = 50;
        auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (width_ - L - R); };
        auto py = [&](double y) { return height_ - B - (y - ymin) / (ymax - ymin) * (height_ - T - B); };

        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
           << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title_
           << "</text>\n";

        for (const auto& b : bands_) {
            os << "<path d=\"";
            for (std::size_t i = 0; i < b.points.size(); ++i) {
                auto [x, lo, hi] = b.points[i];
                os << (i == 0 ? 'M' : 'L') << fmt(px(x)) << ' ' << fmt(py(hi)) << ' ';
            }
            for (std::size_t i = b.points.size(); i-- > 0;) {
                auto [x, lo, hi] = b.points[i];
                os << 'L' << fmt(px(x)) << ' ' << fmt(py(lo)) << ' ';
            }
            os << "Z\" fill=\"" << b.color << "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
        }

        // axes and ticks
        os << "<line x1=\"" << L << "\" y1=\"" << height_ - B << "\" x2=\"" << width_ - R << "\" y2=\""
           << height_ - B << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << height_ - B
           << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            double x = xmin + (xmax - xmin) * i / 5.0;
            double y = ymin + (ymax - ymin) * i / 5.0;
            os << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << height_ - B << "\" x2=\"" << fmt(px(x))
               << "\" y2=\"" << height_ - B + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(px(x)) << "\" y=\"" << height_ - B + 18
               << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(x) << "</text>\n";
            os << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << L << "\" y2=\""
               << fmt(py(y)) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(y) + 4)
               << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y) << "</text>\n";
        }
        os << "<text x=\"" << (L + width_ - R) / 2 << "\" y=\"" << height_ - 12
           << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label_ << "</text>\n";
        os << "<text x=\"16\" y=\"" << (T + height_ - B) / 2
           << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
           << (T + height_ - B) / 2 << ")\">" << y_label_ << "</text>\n";

        int legend_y = T + 6;
        for (const auto& s : series_) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
            if (s.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (auto [x, y] : s.points) os << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
            os << "\"/>\n";
            for (auto [x, y] : s.points)
                os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.4\" fill=\""
                   << s.color << "\"/>\n";
            os << "<line x1=\"" << width_ - R - 150 << "\" y1=\"" << legend_y << "\" x2=\"" << width_ - R - 126
               << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
               << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
            os << "<text x=\"" << width_ - R - 120 << "\" y=\"" << legend_y + 4 << "\" font-size=\"11\">"
               << s.name << "</text>\n";
            legend_y += 16;
        }
        os << "</svg>\n";
    }

private:
    struct series {
        std::string name;
        std::vector<std::pair<double, double>> points;
        std::string color;
        bool dashed;
    };
    struct band {
        std::vector<std::tuple<double, double, double>> points;
        std::string color;
    };

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

    std::string title_, x_label_, y_label_;
    int width_, height_;
    std::vector<series> series_;
    std::vector<band> bands_;
};

}  // namespace qperc
