#include "decaykit/heff1d.hpp"

#include "decaykit/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace decaykit::heff1d {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct CrossingFunction {
    const SpectralDensity& d;
    spectral::PoleTerm pole;

    // log|a_exp(t)| - log|a_non(t)|, with the pole term kept in log form so
    // it never underflows.
    double operator()(double t) const {
        const double log_exp = std::log(std::abs(pole.residue)) + pole.pole.imag() * t;
        const auto split = amplitude::survival_contour(d, t);
        return log_exp - std::log(std::abs(split.a_non));
    }
};

double bisect(const CrossingFunction& f, double lo, double hi, double f_lo, double rel_tol, int& iterations) {
    iterations = 0;
    while (hi - lo > rel_tol * hi && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        ++iterations;
        if ((fm > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

EffectiveHamiltonianSample effective_hamiltonian(const SpectralDensity& d, double t, double tol) {
    if (!(t > 0.0)) throw DomainError("effective_hamiltonian: t must be positive");
    EffectiveHamiltonianSample s;
    s.t = t;
    bool destructive = false;
    if (d.pole_term()) {
        const auto c = amplitude::survival_contour_sample(d, t);
        s.a = c.value.total();
        s.adot = c.derivative.total();
        const double scale = std::abs(c.value.a_exp) + std::abs(c.value.a_non);
        s.amplitude_error = c.value.error + 4.0 * kEps * scale;
        destructive = std::abs(s.a) < kDestructiveFraction * std::max(std::abs(c.value.a_exp), std::abs(c.value.a_non));
    } else {
        const auto sample = amplitude::survival_sample(d, t, tol);
        s.a = sample.a;
        s.adot = sample.adot;
        s.amplitude_error = sample.error;
    }
    const double modulus = std::abs(s.a);
    if (modulus < 2.0 * s.amplitude_error) {
        std::ostringstream msg;
        msg << "effective_hamiltonian: |a(t)| = " << modulus << " below twice its error estimate at t = " << t;
        throw NumericError(msg.str(), s.amplitude_error);
    }
    s.h = kI * s.adot / s.a;
    s.energy = s.h.real();
    s.rate = -2.0 * s.h.imag();
    s.trusted = !(modulus < 10.0 * s.amplitude_error || destructive);
    return s;
}

std::vector<EffectiveHamiltonianSample> effective_hamiltonian_curve(const SpectralDensity& d,
                                                                    std::span<const double> t_grid, double tol,
                                                                    Execution exec) {
    std::vector<EffectiveHamiltonianSample> out(t_grid.size());
    std::vector<std::string> failures(t_grid.size());
    for_each_index(t_grid.size(), exec, [&](std::size_t k) {
        try {
            out[k] = effective_hamiltonian(d, t_grid[k], tol);
        } catch (const Error& e) {
            failures[k] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw NumericError(f);
    return out;
}

TransitionTimeResult transition_time(const SpectralDensity& d) {
    const auto pole = d.pole_term();
    if (!pole) throw DomainError("transition_time: needs a resonance density, got " + d.kind_name());
    const double gamma = -2.0 * pole->pole.imag();
    const double tau = 1.0 / gamma;
    const CrossingFunction f{d, *pole};

    const double f_tau = f(tau);
    if (!(f_tau > 0.0)) throw NumericError("transition_time: background already dominates at t = tau", f_tau);

    // Geometric scan so that the first sign change is the one bracketed.
    constexpr double kRatio = 1.01;
    constexpr double kMaxSpan = 1e8;
    TransitionTimeResult r;
    bool found = false;
    double lo = tau, f_lo = f_tau;
    double hi_limit = 1e3 * tau;
    while (!found) {
        for (double t = lo * kRatio; t <= hi_limit * (1.0 + 1e-12); t *= kRatio) {
            const double ft = f(t);
            if ((ft > 0.0) != (f_lo > 0.0)) {
                if (!found) {
                    int it = 0;
                    r.t_as = bisect(f, lo, t, f_lo, 1e-14, it);
                    r.iterations = it;
                    r.t_lo = lo;
                    r.t_hi = t;
                    found = true;
                } else {
                    int it = 0;
                    r.later_crossings.push_back(bisect(f, lo, t, f_lo, 1e-10, it));
                }
            }
            lo = t;
            f_lo = ft;
        }
        if (!found) {
            if (hi_limit >= kMaxSpan * tau)
                throw NumericError("transition_time: no crossing below 1e8 tau", hi_limit);
            hi_limit *= 10.0;
        }
    }
    // Tighten the reported bracket around the root.
    const double w = std::max(r.t_as * 1e-14, std::numeric_limits<double>::min());
    r.t_lo = std::max(r.t_lo, r.t_as - w);
    r.t_hi = std::min(r.t_hi, r.t_as + w);
    r.residual = 2.0 * std::abs(f(r.t_as));
    return r;
}

AsymptoticFit asymptotic_fit(std::span<const EffectiveHamiltonianSample> samples, std::optional<double> emin_known) {
    std::vector<EffectiveHamiltonianSample> use;
    for (const auto& s : samples)
        if (s.trusted && s.t > 0.0) use.push_back(s);
    if (use.size() < 6) throw DomainError("asymptotic_fit: need at least 6 trusted samples");
    std::sort(use.begin(), use.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    const auto k = static_cast<Index>(use.size());
    const bool fit_emin = !emin_known.has_value();
    const Index unknowns = fit_emin ? 3 : 2;

    // Real formulation: Re h = E - c2 / t^2, Im h = -c1 / t.
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(2 * k, unknowns);
    Eigen::VectorXd rhs(2 * k);
    for (Index i = 0; i < k; ++i) {
        const double t = use[static_cast<std::size_t>(i)].t;
        const cplx h = use[static_cast<std::size_t>(i)].h;
        const Index c = fit_emin ? 1 : 0;
        if (fit_emin) design(i, 0) = 1.0;
        design(i, c + 1) = -1.0 / (t * t);
        design(k + i, c) = -1.0 / t;
        rhs(i) = h.real() - (fit_emin ? 0.0 : *emin_known);
        rhs(k + i) = h.imag();
    }
    const Eigen::VectorXd scale = design.colwise().norm().transpose();
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxFitCondition))
        throw NumericError("asymptotic_fit: window too narrow, condition estimate exceeds 1e8", cond);
    const Eigen::VectorXd coef = svd.solve(rhs).cwiseQuotient(scale);

    AsymptoticFit fit;
    fit.condition = cond;
    fit.emin_estimate = fit_emin ? coef(0) : *emin_known;
    fit.c1 = coef(fit_emin ? 1 : 0);
    fit.c2 = coef(fit_emin ? 2 : 1);

    // Unconstrained complex fit to measure how far the coefficients are from
    // real. Two extra orders absorb the truncation of the series, which would
    // otherwise leak into the imaginary parts of the leading coefficients.
    constexpr Index kProbeExtra = 2;
    const Index probe = unknowns + kProbeExtra;
    Eigen::MatrixXcd cdesign(k, probe);
    Eigen::VectorXcd crhs(k);
    for (Index i = 0; i < k; ++i) {
        const double t = use[static_cast<std::size_t>(i)].t;
        const cplx x = -kI / t;
        cplx power = fit_emin ? cplx(1.0) : x;
        for (Index c = 0; c < probe; ++c, power *= x) cdesign(i, c) = power;
        crhs(i) = use[static_cast<std::size_t>(i)].h - (fit_emin ? 0.0 : *emin_known);
    }
    const Eigen::VectorXd cscale = cdesign.colwise().norm().transpose();
    const Eigen::VectorXcd ccoef =
        (cdesign * cscale.cwiseInverse().asDiagonal()).colPivHouseholderQr().solve(crhs).cwiseQuotient(cscale.cast<cplx>());
    fit.max_imag_coefficient = ccoef.head(unknowns).imag().cwiseAbs().maxCoeff();

    double ss = 0.0;
    for (const auto& s : use) {
        const cplx x = -kI / s.t;
        ss += std::norm(s.h - (fit.emin_estimate + x * fit.c1 + x * x * fit.c2));
    }
    fit.residual = std::sqrt(ss / static_cast<double>(use.size()));
    fit.samples_used = use.size();
    fit.t_first = use.front().t;
    fit.t_last = use.back().t;
    const auto& first = use.front().h;
    const auto& last = use.back().h;
    fit.limits_consistent = std::abs(last.real() - fit.emin_estimate) <= std::abs(first.real() - fit.emin_estimate) + 1e-12 &&
                            std::abs(last.imag()) < std::abs(first.imag());
    return fit;
}

double tail_exponent(std::span<const amplitude::CurvePoint> curve) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = 0.0;
    for (const auto& p : curve) {
        if (!(p.t > 0.0) || !(p.probability > 0.0)) continue;
        const double x = std::log(p.t), y = std::log(p.probability);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1.0;
    }
    if (n < 2.0) throw DomainError("tail_exponent: need at least two points with t > 0 and P > 0");
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) throw DomainError("tail_exponent: times must not all coincide");
    return -(n * sxy - sx * sy) / denom;
}

double tail_exponent(const SpectralDensity& d, double t_lo, double t_hi, std::size_t points) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || points < 2) throw DomainError("tail_exponent: bad time window");
    if (d.pole_term()) {
        const double t_as = transition_time(d).t_as;
        if (t_lo < 3.0 * t_as) throw DomainError("tail_exponent: window must lie above 3 t_as");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / static_cast<double>(points - 1));
    const auto curve = amplitude::survival_probability_curve(d, grid);
    return tail_exponent(curve);
}

PopulationEstimate surviving_population(const SpectralDensity& d, double n0, double t) {
    if (!(n0 > 0.0)) throw DomainError("surviving_population: n0 must be positive");
    if (!(t >= 0.0)) throw DomainError("surviving_population: t must be non-negative");
    PopulationEstimate p;
    p.n0 = n0;
    p.t = t;
    const double grid[] = {t};
    p.survival_probability = amplitude::survival_probability_curve(d, grid, amplitude::kDefaultTolerance,
                                                                   Execution::serial)
                                 .front()
                                 .probability;
    p.n_surviving = p.survival_probability * n0;
    if (const auto pole = d.pole_term()) {
        const double gamma = -2.0 * pole->pole.imag();
        p.t_as = transition_time(d).t_as;
        p.threshold = std::exp(gamma * p.t_as);
        p.n_at_crossover = n0 * std::exp(-gamma * p.t_as);
        p.source_sufficient = n0 >= kAbundanceMargin * p.threshold;
    } else {
        p.t_as = p.threshold = p.n_at_crossover = std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

} // namespace decaykit::heff1d
