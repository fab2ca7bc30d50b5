#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "decolab/errors.hpp"

namespace decolab::cli {

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 6> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double map(double v, double p0, double p1) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return p0 + t * (p1 - p0);
    }
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
            return out;
        }
        const double raw = (hi - lo) / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
            out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
        return out;
    }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const Plot& p, bool is_x) {
    Axis a;
    a.log = is_x ? p.log_x : p.log_y;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], p.log_x) || !usable(s.y[i], p.log_y)) continue;
            const double v = is_x ? s.x[i] : s.y[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (!is_x && s.style == Series::Style::bars && !a.log) lo = std::min(lo, 0.0);
        }
    if (!std::isfinite(lo)) {
        lo = a.log ? 1.0 : 0.0;
        hi = a.log ? 10.0 : 1.0;
    }
    if (a.log) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (!is_x) {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

}  // namespace

std::string render_svg(const Plot& plot) {
    const Axis ax = make_axis(plot, true), ay = make_axis(plot, false);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double px = ax.map(t, x0, x1);
        o << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 5)
          << "\" stroke=\"black\"/><text x=\"" << num(px) << "\" y=\"" << num(y0 + 18)
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double py = ay.map(t, y0, y1);
        o << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
          << "\" stroke=\"black\"/><text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4)
          << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
    }
    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(18 " << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";
    o << "<clipPath id=\"frame\"><rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\"/></clipPath>\n<g clip-path=\"url(#frame)\">\n";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* colour = kColours[k % kColours.size()];
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], plot.log_x) && usable(s.y[i], plot.log_y))
                pts.emplace_back(ax.map(s.x[i], x0, x1), ay.map(s.y[i], y0, y1));
        if (s.style == Series::Style::line) {
            if (pts.empty()) continue;
            o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
            o << "\"/>\n";
        } else if (s.style == Series::Style::points) {
            for (const auto& [px, py] : pts)
                o << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
        } else {
            const double base = ay.map(ay.log ? std::pow(10.0, ay.lo) : std::max(ay.lo, 0.0), y0, y1);
            const double w = pts.size() > 1 ? std::abs(pts[1].first - pts[0].first) : 4.0;
            for (const auto& [px, py] : pts)
                o << "<rect x=\"" << num(px - w / 2) << "\" y=\"" << num(std::min(py, base)) << "\" width=\"" << num(w)
                  << "\" height=\"" << num(std::abs(base - py)) << "\" fill=\"" << colour
                  << "\" fill-opacity=\"0.5\"/>\n";
        }
    }
    o << "</g>\n";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const double ly = y1 + 16 + 18 * k;
        o << "<rect x=\"" << num(x1 + 12) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
          << kColours[k % kColours.size()] << "\"/><text x=\"" << num(x1 + 30) << "\" y=\"" << num(ly) << "\">"
          << escape(plot.series[k].label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_svg(const std::string& path, const Plot& plot) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << render_svg(plot);
}

}  // namespace decolab::cli
