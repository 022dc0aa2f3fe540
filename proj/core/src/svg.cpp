#include "nsid/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsid/errors.hpp"
#include "nsid/io.hpp"

namespace nsid::svg {

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    return io::format_sig(v, 6);
}

struct Range {
    double lo{std::numeric_limits<double>::infinity()};
    double hi{-std::numeric_limits<double>::infinity()};

    void include(double v) {
        if (!std::isfinite(v))
            return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

std::vector<double> ticks(double lo, double hi, int target = 5) {
    const double span = hi - lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
}

} // namespace

void Plot::add_line(std::vector<double> x, std::vector<double> y, std::string color,
                    std::string label) {
    if (x.size() != y.size())
        throw ArgumentError("svg::Plot: x/y length mismatch");
    series_.push_back({std::move(x), std::move(y), std::move(color), std::move(label), false});
}

void Plot::add_points(std::vector<double> x, std::vector<double> y, std::string color,
                      std::string label) {
    if (x.size() != y.size())
        throw ArgumentError("svg::Plot: x/y length mismatch");
    series_.push_back({std::move(x), std::move(y), std::move(color), std::move(label), true});
}

void Plot::add_hline(double y, std::string color, bool dashed) {
    rules_.push_back({y, true, std::move(color), dashed});
}

void Plot::add_vline(double x, std::string color, bool dashed) {
    rules_.push_back({x, false, std::move(color), dashed});
}

void Plot::add_annotation(std::string text) {
    annotations_.push_back(std::move(text));
}

std::string Plot::render(double ox, double oy, double width, double height) const {
    const double ml = 70.0, mr = 20.0, mt = 34.0, mb = 48.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    Range rx, ry;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.include(s.x[i]);
            ry.include(s.y[i]);
        }
    for (const auto& r : rules_)
        (r.horizontal ? ry : rx).include(r.value);
    rx.finish();
    ry.finish();

    const auto px = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    const auto py = [&](double v) { return oy + mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

    std::ostringstream os;
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"" << num(ox + ml) << "\" y=\"" << num(oy + mt) << "\" width=\"" << num(pw)
       << "\" height=\"" << num(ph) << "\" fill=\"white\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(ox + width / 2) << "\" y=\"" << num(oy + 18)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << esc(title_) << "</text>\n";

    for (double t : ticks(rx.lo, rx.hi)) {
        os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(oy + mt + ph) << "\" x2=\""
           << num(px(t)) << "\" y2=\"" << num(oy + mt + ph + 5) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(oy + mt + ph + 18)
           << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    }
    for (double t : ticks(ry.lo, ry.hi)) {
        os << "<line x1=\"" << num(ox + ml - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\""
           << num(ox + ml) << "\" y2=\"" << num(py(t)) << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << num(ox + ml - 8) << "\" y=\"" << num(py(t) + 4)
           << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
    }
    os << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + height - 8)
       << "\" text-anchor=\"middle\">" << esc(xlabel_) << "</text>\n";
    os << "<text transform=\"translate(" << num(ox + 16) << "," << num(oy + mt + ph / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel_) << "</text>\n";

    for (const auto& r : rules_) {
        const std::string dash = r.dashed ? " stroke-dasharray=\"5,4\"" : "";
        if (r.horizontal)
            os << "<line x1=\"" << num(ox + ml) << "\" y1=\"" << num(py(r.value)) << "\" x2=\""
               << num(ox + ml + pw) << "\" y2=\"" << num(py(r.value)) << "\" stroke=\""
               << r.color << "\"" << dash << "/>\n";
        else
            os << "<line x1=\"" << num(px(r.value)) << "\" y1=\"" << num(oy + mt) << "\" x2=\""
               << num(px(r.value)) << "\" y2=\"" << num(oy + mt + ph) << "\" stroke=\""
               << r.color << "\"" << dash << "/>\n";
    }

    for (const auto& s : series_) {
        if (s.points) {
            os << "<g fill=\"" << s.color << "\" fill-opacity=\"0.6\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
                       << "\" r=\"2\"/>\n";
            os << "</g>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"1.2\" points=\"";
            bool open = false;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    if (open) {
                        os << "\"/>\n<polyline fill=\"none\" stroke=\"" << s.color
                           << "\" stroke-width=\"1.2\" points=\"";
                        open = false;
                    }
                    continue;
                }
                os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
                open = true;
            }
            os << "\"/>\n";
        }
    }

    double legend_y = oy + mt + 16;
    for (const auto& s : series_)
        if (!s.label.empty()) {
            os << "<line x1=\"" << num(ox + ml + 10) << "\" y1=\"" << num(legend_y - 4)
               << "\" x2=\"" << num(ox + ml + 34) << "\" y2=\"" << num(legend_y - 4)
               << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << num(ox + ml + 40) << "\" y=\"" << num(legend_y) << "\">"
               << esc(s.label) << "</text>\n";
            legend_y += 16;
        }
    for (const auto& a : annotations_) {
        os << "<text x=\"" << num(ox + ml + pw - 8) << "\" y=\"" << num(legend_y)
           << "\" text-anchor=\"end\">" << esc(a) << "</text>\n";
        legend_y += 16;
    }
    os << "</g>\n";
    return os.str();
}

void write_figure(const std::filesystem::path& path, const std::vector<Plot>& plots,
                  double width, double plot_height) {
    std::ostringstream os;
    const double total = plot_height * static_cast<double>(plots.size());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(total) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(total) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    double y = 0.0;
    for (const auto& p : plots) {
        os << p.render(0.0, y, width, plot_height);
        y += plot_height;
    }
    os << "</svg>\n";
    io::write_file(path, os.str());
}

} // namespace nsid::svg
