#include "decaykit/io/svg.hpp"

#include "decaykit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace decaykit::io {

namespace {

const char* kColours[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
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
    bool log = false;
    double lo = 0.0, hi = 1.0; // in transformed units (log10 when log)

    double map(double v) const { return log ? std::log10(v) : v; }
    bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

    void fit(const std::vector<PlotSeries>& series, bool use_x) {
        double a = std::numeric_limits<double>::infinity(), b = -a;
        for (const auto& s : series)
            for (double v : use_x ? s.x : s.y)
                if (valid(v)) {
                    a = std::min(a, map(v));
                    b = std::max(b, map(v));
                }
        if (!std::isfinite(a)) a = 0.0, b = 1.0;
        if (b - a < 1e-12) a -= 0.5, b += 0.5;
        if (log) {
            lo = std::floor(a);
            hi = std::ceil(b);
        } else {
            const double pad = 0.03 * (b - a);
            lo = a - pad;
            hi = b + pad;
        }
    }

    // Tick positions in data units.
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 10.0)));
            for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step) out.push_back(std::pow(10.0, e));
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
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
            out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        return out;
    }
};

} // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    Axis ax{spec.log_x}, ay{spec.log_y};
    ax.fit(series, true);
    ay.fit(series, false);
    auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(spec.width) << "\" height=\"" << num(spec.height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << num(spec.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
    s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ax.ticks()) {
        const double x = px(t);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
          << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
          << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\"" << num(y)
          << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(t)
          << "</text>\n";
    }
    s << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 15) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    s << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& sr = series[k];
        const char* colour = kColours[k % std::size(kColours)];
        std::string points;
        auto flush = [&] {
            if (!points.empty())
                s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << points
                  << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
            if (!ax.valid(sr.x[i]) || !ay.valid(sr.y[i])) {
                flush();
                continue;
            }
            points += (points.empty() ? "" : " ") + num(px(sr.x[i])) + "," + num(py(sr.y[i]));
        }
        flush();
        if (!sr.label.empty())
            s << "<text x=\"" << num(left + pw - 10) << "\" y=\"" << num(top + 16 + 14 * static_cast<double>(k))
              << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(sr.label) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write `" + path + "`");
    out << text;
    if (!out) throw ConfigError("failed writing `" + path + "`");
}

} // namespace decaykit::io
