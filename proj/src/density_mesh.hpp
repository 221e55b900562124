// density_mesh.hpp - panel layouts adapted to each density's features (internal)

#pragma once

#include "decaykit/quadrature.hpp"
#include "decaykit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace decaykit::spectral::detail {

// Upper end of the real-axis panels for densities with an infinite tail;
// beyond it the tail is handled analytically.
inline double resonance_panel_end(double e0, double gamma0, double emin) {
    return e0 + std::max(e0 - emin, 20.0 * gamma0);
}

// Panels for a resonance of width gamma0 at e0 on [emin, end]: width at most
// a quarter of the distance to the complex poles, and at most `cap`.
inline std::vector<double> resonance_breaks(double e0, double gamma0, double emin, double end, double cap) {
    return quad::graded_breaks(emin, end, [=](double x) {
        const double dist = std::hypot(x - e0, 0.5 * gamma0);
        return std::min(cap, 0.25 * dist);
    });
}

// Panels on [lo, hi] refined geometrically toward both ends (log-type edge
// behaviour) and around a feature at `centre` of width `width`.
inline std::vector<double> band_breaks(double lo, double hi, double centre, double width, double cap,
                                       const std::vector<double>& kinks) {
    const double span = hi - lo;
    const double floor = 1e-9 * span;
    std::vector<double> pts{lo, hi};
    for (double k : kinks)
        if (k > lo && k < hi) pts.push_back(k);
    std::sort(pts.begin(), pts.end());
    std::vector<double> out{lo};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        auto piece = quad::graded_breaks(a, b, [=](double x) {
            const double edge = std::min(x - lo, hi - x);
            double h = std::min({cap, span / 64.0, 0.25 * std::max(std::abs(x - centre), width)});
            h = std::min(h, 0.25 * std::max(edge, 0.0));
            // Refine toward the right end of the piece as well.
            h = std::min(h, 0.25 * (b - x));
            return std::max(h, floor);
        });
        out.insert(out.end(), piece.begin() + 1, piece.end());
    }
    return out;
}

inline double friedrichs_value(const ContinuumReservoir& c, double energy) {
    const double g = c.coupling.amplitude(energy);
    if (g == 0.0) return 0.0;
    const double g2 = g * g;
    const double detune = energy - c.level - continuum_shift(c.coupling, energy);
    return c.norm * g2 / (detune * detune + std::pow(std::numbers::pi * g2, 2));
}

inline std::vector<double> friedrichs_breaks(const ContinuumReservoir& c, double cap) {
    const double g = c.coupling.amplitude(std::clamp(c.level, c.coupling.lower(), c.coupling.upper()));
    const double width = std::max(2.0 * std::numbers::pi * g * g, 1e-6 * (c.coupling.upper() - c.coupling.lower()));
    return band_breaks(c.coupling.lower(), c.coupling.upper(), c.level, width, cap, c.coupling.kinks());
}

} // namespace decaykit::spectral::detail
