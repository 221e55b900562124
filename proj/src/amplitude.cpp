#include "decaykit/amplitude.hpp"

#include "decaykit/errors.hpp"
#include "density_mesh.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace decaykit::amplitude {

using spectral::ContinuumReservoir;
using spectral::Interpolation;
using spectral::LinearOnsetResonance;
using spectral::Tabulated;
using spectral::TruncatedBreitWigner;

namespace {

constexpr cplx kI(0.0, 1.0);

template <class F>
quad::Estimate<cplx> sum_panels(F&& f, const std::vector<double>& breaks, Execution exec) {
    std::vector<quad::Estimate<cplx>> parts(breaks.size() - 1);
    for_each_index(parts.size(), exec, [&](std::size_t i) { parts[i] = quad::panel(f, breaks[i], breaks[i + 1]); });
    quad::Estimate<cplx> sum;
    for (const auto& p : parts) sum += p;
    return sum;
}

// Half an oscillation of exp(-iEt) per panel.
double oscillation_cap(double t) {
    return t == 0.0 ? std::numeric_limits<double>::infinity() : std::numbers::pi / std::abs(t);
}

struct ResonanceShape {
    double e0, gamma0, emin;
};

std::optional<ResonanceShape> resonance_shape(const SpectralDensity& d) {
    if (const auto* bw = d.as<TruncatedBreitWigner>()) return ResonanceShape{bw->e0, bw->gamma0, bw->emin};
    if (const auto* lo = d.as<LinearOnsetResonance>()) return ResonanceShape{lo->e0, lo->gamma0, lo->emin};
    return std::nullopt;
}

// Integral of `weight(E) omega(E) exp(-iEt)` on the real axis. `weight` is
// 1 for a(t) and -iE for da/dt.
template <class W>
quad::Estimate<cplx> real_axis(const SpectralDensity& d, double t, W&& weight, Execution exec) {
    const double cap = oscillation_cap(t);
    auto integrand = [&](double e) { return weight(e) * d.value(e) * std::exp(-kI * e * t); };

    if (const auto* tab = d.as<Tabulated>()) {
        if (tab->mode == Interpolation::point_masses) {
            quad::Estimate<cplx> sum;
            for (std::size_t k = 0; k < tab->energy.size(); ++k)
                sum.value += tab->weight[k] * weight(tab->energy[k]) * std::exp(-kI * tab->energy[k] * t);
            sum.error = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(tab->energy.size());
            return sum;
        }
        std::vector<double> breaks{tab->energy.front()};
        for (std::size_t k = 0; k + 1 < tab->energy.size(); ++k) {
            const double a = tab->energy[k], b = tab->energy[k + 1];
            const auto pieces = static_cast<int>(std::ceil((b - a) / std::min(cap, b - a)));
            for (int j = 1; j <= pieces; ++j) breaks.push_back(j == pieces ? b : a + j * (b - a) / pieces);
        }
        return sum_panels(integrand, breaks, exec);
    }

    if (const auto* c = d.as<ContinuumReservoir>())
        return sum_panels(integrand, spectral::detail::friedrichs_breaks(*c, cap), exec);

    const auto shape = *resonance_shape(d);
    const double end = spectral::detail::resonance_panel_end(shape.e0, shape.gamma0, shape.emin);
    const auto breaks = spectral::detail::resonance_breaks(shape.e0, shape.gamma0, shape.emin, end, cap);
    auto sum = sum_panels(integrand, breaks, exec);

    // Tail [end, inf).
    if (t == 0.0) {
        auto mapped = [&](double v) -> cplx { return v > 0.0 ? integrand(end / v) * end / (v * v) : cplx(0.0); };
        for (int k = 0; k < 8; ++k) sum += quad::panel(mapped, k / 8.0, (k + 1) / 8.0);
        return sum;
    }
    // Rotate E = end - i sign(t) u; no singularity lies between the ray and the axis.
    const double sign = t > 0.0 ? 1.0 : -1.0;
    auto rotated = [&](double u) {
        const cplx e(end, -sign * u);
        return weight(e) * d.continued_value(e);
    };
    auto tail = quad::laplace(rotated, std::abs(t), end - shape.e0);
    const cplx factor = -kI * sign * std::exp(-kI * end * t);
    sum.value += factor * tail.value;
    sum.error += tail.error;
    return sum;
}

void check_tolerance(const quad::Estimate<cplx>& est, double tol, const char* what, double t) {
    if (!(est.error <= tol)) {
        std::ostringstream msg;
        msg << what << ": tolerance " << tol << " not reached at t = " << t << " (estimate " << est.error << ")";
        throw NumericError(msg.str(), est.error);
    }
}

void check_contour(const SpectralDensity& d, double t) {
    if (!d.pole_term()) throw DomainError("contour method needs a resonance density, got " + d.kind_name());
    if (!(t > 0.0)) throw DomainError("contour method needs t > 0");
}

// a(t) alone by the best route; used by probability curves.
quad::Estimate<cplx> survival_value(const SpectralDensity& d, double t, double tol, Execution exec) {
    if (d.pole_term() && t != 0.0) {
        const auto split = survival_contour(d, std::abs(t));
        const cplx a = split.total();
        return {t > 0.0 ? a : std::conj(a), split.error};
    }
    return survival_direct(d, t, tol, exec);
}

} // namespace

quad::Estimate<cplx> survival_direct(const SpectralDensity& d, double t, double tol, Execution exec) {
    if (!(tol > 0.0)) throw DomainError("survival_direct: tolerance must be positive");
    if (!std::isfinite(t)) throw DomainError("survival_direct: t must be finite");
    auto est = real_axis(d, t, [](auto) { return cplx(1.0); }, exec);
    check_tolerance(est, tol, "survival_direct", t);
    return est;
}

AmplitudeSplit survival_contour(const SpectralDensity& d, double t) {
    return survival_contour_sample(d, t).value;
}

ContourSample survival_contour_sample(const SpectralDensity& d, double t) {
    check_contour(d, t);
    const auto pole = *d.pole_term();
    const double emin = d.emin();

    const cplx a_exp = pole.residue * std::exp(-kI * pole.pole * t);
    auto background = [&](double s) { return d.continued_value(cplx(emin, -s)); };
    auto background_dot = [&](double s) { return d.continued_value(cplx(emin, -s)) * cplx(-s, -emin); };
    const auto non = quad::laplace(background, t, pole.singular_distance);
    const auto non_dot = quad::laplace(background_dot, t, pole.singular_distance);
    const cplx phase = -kI * std::exp(-kI * emin * t);

    ContourSample out;
    out.value = {t, a_exp, phase * non.value, non.error};
    out.derivative = {t, -kI * pole.pole * a_exp, phase * non_dot.value, non_dot.error};
    return out;
}

quad::Estimate<cplx> survival_derivative(const SpectralDensity& d, double t, double tol) {
    if (d.pole_term()) {
        if (t == 0.0)
            throw DomainError("survival_derivative: da/dt diverges at t = 0 (infinite first moment)");
        const auto s = survival_contour_sample(d, std::abs(t)).derivative;
        const cplx v = s.total();
        // a(-t) = conj(a(t)) implies a'(-t) = -conj(a'(t)).
        return {t > 0.0 ? v : -std::conj(v), s.error};
    }
    if (!d.has_finite_first_moment())
        throw DomainError("survival_derivative: da/dt diverges for this density");
    auto est = real_axis(d, t, [](auto e) { return -kI * cplx(e); }, Execution::serial);
    check_tolerance(est, tol, "survival_derivative", t);
    return est;
}

SurvivalSample survival_sample(const SpectralDensity& d, double t, double tol) {
    if (d.pole_term() && t != 0.0) {
        const auto s = survival_contour_sample(d, std::abs(t));
        const cplx a = s.value.total(), adot = s.derivative.total();
        if (t > 0.0) return {t, a, adot, s.value.error};
        return {t, std::conj(a), -std::conj(adot), s.value.error};
    }
    const auto a = survival_direct(d, t, tol, Execution::serial);
    const auto adot = survival_derivative(d, t, tol);
    return {t, a.value, adot.value, a.error};
}

std::vector<CurvePoint> survival_probability_curve(const SpectralDensity& d, std::span<const double> t_grid,
                                                   double tol, Execution exec) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= 0.0)) throw DomainError("survival_probability_curve: times must be non-negative");
        if (k > 0 && !(t_grid[k] > t_grid[k - 1]))
            throw DomainError("survival_probability_curve: time grid must be strictly increasing");
    }
    std::vector<CurvePoint> out(t_grid.size());
    std::vector<std::string> failures(t_grid.size());
    for_each_index(t_grid.size(), exec, [&](std::size_t k) {
        try {
            const auto a = survival_value(d, t_grid[k], tol, Execution::serial);
            out[k] = {t_grid[k], std::norm(a.value)};
        } catch (const NumericError& e) {
            failures[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < failures.size(); ++k)
        if (!failures[k].empty()) throw NumericError(failures[k]);
    return out;
}

} // namespace decaykit::amplitude
