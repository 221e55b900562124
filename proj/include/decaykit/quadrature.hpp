// quadrature.hpp - panel quadrature building blocks
//
// Composite Gauss-Legendre with an embedded lower-order rule for error
// estimation, a graded Laplace-type integrator for integrands damped by
// e^{-s t}, and a subtraction-based principal value.

#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace decaykit::quad {

template <std::size_t N>
struct Rule {
    std::array<double, N> node{};
    std::array<double, N> weight{};
};

namespace detail {
template <std::size_t N>
Rule<N> expand_boost_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    Rule<N> r;
    std::size_t k = 0;
    // Boost stores the non-negative half; a zero node appears only for odd N.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            r.node[k] = 0.0;
            r.weight[k++] = w[i];
            continue;
        }
        r.node[k] = -x[i];
        r.weight[k++] = w[i];
        r.node[k] = x[i];
        r.weight[k++] = w[i];
    }
    return r;
}
} // namespace detail

inline const Rule<20>& gauss20() {
    static const Rule<20> r = detail::expand_boost_rule<20>();
    return r;
}

inline const Rule<10>& gauss10() {
    static const Rule<10> r = detail::expand_boost_rule<10>();
    return r;
}

template <class T>
struct Estimate {
    T value{};
    double error = 0.0;

    Estimate& operator+=(const Estimate& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

// One panel [a, b]: 20-point Gauss value, |G20 - G10| as the error estimate.
template <class F>
auto panel(F&& f, double a, double b) -> Estimate<decltype(f(a))> {
    using T = decltype(f(a));
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    T hi{}, lo{};
    const auto& g20 = gauss20();
    for (std::size_t i = 0; i < 20; ++i) hi += g20.weight[i] * f(mid + half * g20.node[i]);
    const auto& g10 = gauss10();
    for (std::size_t i = 0; i < 10; ++i) lo += g10.weight[i] * f(mid + half * g10.node[i]);
    return {hi * half, std::abs(hi - lo) * std::abs(half)};
}

// Breakpoints for [a, b] so that every panel is no wider than max_width(x)
// evaluated at its left end. max_width must be positive.
template <class W>
std::vector<double> graded_breaks(double a, double b, W&& max_width) {
    std::vector<double> x{a};
    double cur = a;
    while (cur < b) {
        const double h = max_width(cur);
        // Avoid a sliver panel at the end.
        cur = (cur + 1.5 * h >= b) ? b : cur + h;
        x.push_back(cur);
    }
    return x;
}

template <class F>
auto composite(F&& f, const std::vector<double>& breaks) -> Estimate<decltype(f(breaks[0]))> {
    Estimate<decltype(f(breaks[0]))> sum;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += panel(f, breaks[i], breaks[i + 1]);
    return sum;
}

// Damping cut-off for laplace(): e^{-kLaplaceCutoff} is far below double epsilon.
inline constexpr double kLaplaceCutoff = 50.0;

// Integral over s in [0, inf) of g(s) e^{-s t} for t > 0, via s = x / t.
// `singular_distance` is the distance from the ray to the nearest
// singularity of g; panels are graded so each is at most a quarter of that
// distance (in s) and at most 2 in x.
template <class G>
Estimate<std::complex<double>> laplace(G&& g, double t, double singular_distance) {
    const double scale = singular_distance * t;
    const auto breaks = graded_breaks(0.0, kLaplaceCutoff, [scale](double x) {
        return std::min(2.0, 0.25 * std::max(x, scale));
    });
    auto integrand = [&](double x) { return std::complex<double>(g(x / t)) * std::exp(-x); };
    auto est = composite(integrand, breaks);
    est.value /= t;
    est.error /= t;
    return est;
}

// Principal value of the integral of f(E) / (E - eps) over [a, b] by
// subtracting f(eps). `breaks` are interior points where f is not smooth.
template <class F>
Estimate<double> principal_value(F&& f, double a, double b, double eps,
                                 std::vector<double> breaks = {}, int panels_per_piece = 8) {
    breaks.push_back(a);
    breaks.push_back(b);
    const bool inside = eps > a && eps < b;
    if (inside) breaks.push_back(eps);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return x < a || x > b; }),
                 breaks.end());

    const double f_eps = inside ? f(eps) : 0.0;
    auto integrand = [&](double e) { return (f(e) - f_eps) / (e - eps); };

    Estimate<double> sum;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i], hi = breaks[i + 1];
        const double h = (hi - lo) / panels_per_piece;
        for (int k = 0; k < panels_per_piece; ++k) {
            const double pa = lo + k * h;
            const double pb = (k + 1 == panels_per_piece) ? hi : pa + h;
            sum += panel(integrand, pa, pb);
        }
    }
    if (inside) sum.value += f_eps * std::log((b - eps) / (eps - a));
    return sum;
}

} // namespace decaykit::quad
