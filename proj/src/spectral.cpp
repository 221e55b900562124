#include "decaykit/spectral.hpp"

#include "decaykit/errors.hpp"
#include "density_mesh.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace decaykit::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

cplx lorentzian(cplx energy, double e0, double gamma0) {
    const cplx d = energy - e0;
    return gamma0 / (2.0 * kPi) / (d * d + 0.25 * gamma0 * gamma0);
}

cplx onset_factor(cplx energy, double emin, double cutoff) {
    return (energy - emin) / (energy - emin + cutoff);
}

void check_resonance(double e0, double gamma0, double emin) {
    if (!std::isfinite(e0) || !std::isfinite(gamma0) || !std::isfinite(emin))
        throw DomainError("resonance density: parameters must be finite");
    if (!(gamma0 > 0.0)) throw DomainError("resonance density: gamma0 must be positive");
    if (!(e0 > emin)) throw DomainError("resonance density: e0 must lie above emin");
}

// Integral of f over [a, inf) for a resonance-shaped integrand with a 1/E^2
// (or faster) tail: graded panels up to `end`, then E = end / v on (0, 1].
template <class F>
double integrate_resonance(F&& f, double e0, double gamma0, double a) {
    const double end = detail::resonance_panel_end(e0, gamma0, a);
    const auto breaks = detail::resonance_breaks(e0, gamma0, a, end, std::numeric_limits<double>::infinity());
    double sum = quad::composite(f, breaks).value;
    auto mapped = [&](double v) { return v > 0.0 ? f(end / v) * end / (v * v) : 0.0; };
    for (int k = 0; k < 8; ++k) sum += quad::panel(mapped, k / 8.0, (k + 1) / 8.0).value;
    return sum;
}

// Distance from the downward ray {emin - i s : s >= 0} to the point p.
double distance_to_ray(cplx p, double emin) {
    if (p.imag() <= 0.0) return std::abs(p.real() - emin);
    return std::abs(p - emin);
}

} // namespace

double bw_normalization(double e0, double gamma0, double emin) {
    check_resonance(e0, gamma0, emin);
    return 1.0 / (0.5 + std::atan(2.0 * (e0 - emin) / gamma0) / kPi);
}

SpectralDensity SpectralDensity::breit_wigner(double e0, double gamma0, double emin) {
    const double n = bw_normalization(e0, gamma0, emin);
    return SpectralDensity(TruncatedBreitWigner{e0, gamma0, emin, n}, n);
}

SpectralDensity SpectralDensity::linear_onset(double e0, double gamma0, double emin, std::optional<double> cutoff) {
    check_resonance(e0, gamma0, emin);
    const double lam = cutoff.value_or(e0 - emin);
    if (!(lam > 0.0)) throw DomainError("linear-onset density: cutoff must be positive");
    auto raw = [&](double e) {
        return e <= emin ? 0.0 : (onset_factor(e, emin, lam) * lorentzian(e, e0, gamma0)).real();
    };
    const double total = integrate_resonance(raw, e0, gamma0, emin);
    const double n = 1.0 / total;
    return SpectralDensity(LinearOnsetResonance{e0, gamma0, emin, lam, n}, n);
}

SpectralDensity SpectralDensity::point_masses(std::vector<double> energy, std::vector<double> weight) {
    if (energy.empty() || energy.size() != weight.size())
        throw DomainError("point-mass density: need matching, non-empty energy and weight lists");
    for (std::size_t k = 0; k < energy.size(); ++k) {
        if (!std::isfinite(energy[k]) || !std::isfinite(weight[k]))
            throw DomainError("point-mass density: entries must be finite");
        if (weight[k] < 0.0) throw DomainError("point-mass density: weights must be non-negative");
    }
    std::vector<std::size_t> order(energy.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return energy[a] < energy[b]; });
    Tabulated tab{{}, {}, Interpolation::point_masses};
    for (auto k : order) {
        if (!tab.energy.empty() && tab.energy.back() == energy[k]) {
            tab.weight.back() += weight[k];
        } else {
            tab.energy.push_back(energy[k]);
            tab.weight.push_back(weight[k]);
        }
    }
    const double total = std::accumulate(tab.weight.begin(), tab.weight.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("point-mass density: total weight must be positive");
    for (double& w : tab.weight) w /= total;
    return SpectralDensity(std::move(tab), 1.0 / total);
}

SpectralDensity SpectralDensity::interpolated(std::vector<double> energy, std::vector<double> value) {
    if (energy.size() < 2 || energy.size() != value.size())
        throw DomainError("interpolated density: need at least two samples");
    for (std::size_t k = 0; k < energy.size(); ++k) {
        if (value[k] < 0.0) throw DomainError("interpolated density: samples must be non-negative");
        if (k > 0 && !(energy[k] > energy[k - 1]))
            throw DomainError("interpolated density: energies must be strictly increasing");
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < energy.size(); ++k)
        total += 0.5 * (value[k] + value[k + 1]) * (energy[k + 1] - energy[k]);
    if (!(total > 0.0)) throw DomainError("interpolated density: total weight must be positive");
    for (double& v : value) v /= total;
    return SpectralDensity(Tabulated{std::move(energy), std::move(value), Interpolation::piecewise_linear}, 1.0 / total);
}

SpectralDensity SpectralDensity::continuum_reservoir(double level, double emin, Coupling coupling) {
    if (coupling.lower() < emin) throw DomainError("continuum density: coupling band starts below emin");
    ContinuumReservoir c{level, emin, std::move(coupling), 1.0};
    const auto breaks = detail::friedrichs_breaks(c, std::numeric_limits<double>::infinity());
    const double total = quad::composite([&](double e) { return detail::friedrichs_value(c, e); }, breaks).value;
    if (!(total > 0.0)) throw NumericError("continuum density: vanishing continuum weight", total);
    const double factor = 1.0 / total;
    c.norm = factor;
    return SpectralDensity(std::move(c), factor);
}

double SpectralDensity::value(double energy) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TruncatedBreitWigner>) {
                if (energy < d.emin) return 0.0;
                return d.norm * lorentzian(energy, d.e0, d.gamma0).real();
            } else if constexpr (std::is_same_v<T, LinearOnsetResonance>) {
                if (energy <= d.emin) return 0.0;
                return d.norm * (onset_factor(energy, d.emin, d.cutoff) * lorentzian(energy, d.e0, d.gamma0)).real();
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (d.mode == Interpolation::point_masses) return 0.0; // singular measure
                if (energy < d.energy.front() || energy > d.energy.back()) return 0.0;
                auto it = std::upper_bound(d.energy.begin(), d.energy.end(), energy);
                if (it == d.energy.end()) return d.weight.back();
                const auto k = static_cast<std::size_t>(it - d.energy.begin());
                const double w = (energy - d.energy[k - 1]) / (d.energy[k] - d.energy[k - 1]);
                return (1.0 - w) * d.weight[k - 1] + w * d.weight[k];
            } else {
                if (energy < d.emin) return 0.0;
                return detail::friedrichs_value(d, energy);
            }
        },
        v_);
}

double SpectralDensity::emin() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Tabulated>) return d.energy.front();
            else return d.emin;
        },
        v_);
}

double SpectralDensity::support_upper() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Tabulated>) return d.energy.back();
            else if constexpr (std::is_same_v<T, ContinuumReservoir>) return d.coupling.upper();
            else return std::numeric_limits<double>::infinity();
        },
        v_);
}

bool SpectralDensity::has_finite_first_moment() const {
    // Both resonance variants decay like 1/E^2, so E omega(E) is not integrable.
    return std::holds_alternative<Tabulated>(v_) || std::holds_alternative<ContinuumReservoir>(v_);
}

double SpectralDensity::first_moment() const {
    if (!has_finite_first_moment())
        throw DomainError("first moment of a " + kind_name() + " density diverges");
    if (const auto* t = as<Tabulated>()) {
        if (t->mode == Interpolation::point_masses) {
            double m = 0.0;
            for (std::size_t k = 0; k < t->energy.size(); ++k) m += t->energy[k] * t->weight[k];
            return m;
        }
        // Exact for the piecewise-linear interpolant.
        double m = 0.0;
        for (std::size_t k = 0; k + 1 < t->energy.size(); ++k) {
            const double a = t->energy[k], b = t->energy[k + 1];
            const double fa = t->weight[k], fb = t->weight[k + 1];
            m += (b - a) * (fa * (2 * a + b) + fb * (a + 2 * b)) / 6.0;
        }
        return m;
    }
    const auto& c = std::get<ContinuumReservoir>(v_);
    const auto breaks = detail::friedrichs_breaks(c, std::numeric_limits<double>::infinity());
    return quad::composite([&](double e) { return e * detail::friedrichs_value(c, e); }, breaks).value;
}

std::string SpectralDensity::kind_name() const {
    switch (v_.index()) {
    case 0: return "breit-wigner";
    case 1: return "linear-onset";
    case 2: return std::get<Tabulated>(v_).mode == Interpolation::point_masses ? "point-masses" : "interpolated";
    default: return "continuum";
    }
}

std::optional<PoleTerm> SpectralDensity::pole_term() const {
    if (const auto* bw = as<TruncatedBreitWigner>()) {
        const cplx pole(bw->e0, -0.5 * bw->gamma0);
        const double dist = std::min(distance_to_ray(pole, bw->emin), distance_to_ray(std::conj(pole), bw->emin));
        return PoleTerm{pole, cplx(bw->norm, 0.0), dist};
    }
    if (const auto* lo = as<LinearOnsetResonance>()) {
        const cplx pole(lo->e0, -0.5 * lo->gamma0);
        double dist = std::min(distance_to_ray(pole, lo->emin), distance_to_ray(std::conj(pole), lo->emin));
        dist = std::min(dist, lo->cutoff); // real pole at emin - cutoff
        return PoleTerm{pole, lo->norm * onset_factor(pole, lo->emin, lo->cutoff), dist};
    }
    return std::nullopt;
}

cplx SpectralDensity::continued_value(cplx energy) const {
    if (const auto* bw = as<TruncatedBreitWigner>()) return bw->norm * lorentzian(energy, bw->e0, bw->gamma0);
    if (const auto* lo = as<LinearOnsetResonance>())
        return lo->norm * onset_factor(energy, lo->emin, lo->cutoff) * lorentzian(energy, lo->e0, lo->gamma0);
    throw DomainError("no analytic continuation for a " + kind_name() + " density");
}

double continuum_shift(const Coupling& coupling, double energy) {
    const double a = coupling.lower(), b = coupling.upper();
    if (coupling.is_flat()) {
        const double g = coupling.amplitude(a);
        return g * g * std::log(std::abs(energy - a) / std::abs(energy - b));
    }
    auto g2 = [&](double e) {
        const double g = coupling.amplitude(e);
        return g * g;
    };
    return -quad::principal_value(g2, a, b, energy, coupling.kinks()).value;
}

SpectralDensity density_from_model(const FiniteLevelModel& model, Index state) {
    if (model.has_continuum())
        throw DomainError("density_from_model: continuum models are described by continuum_reservoir densities");
    if (!model.subspace_position(state)) throw DomainError("density_from_model: state is not in the subspace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(model.hamiltonian());
    if (solver.info() != Eigen::Success) throw NumericError("density_from_model: eigendecomposition failed");
    std::vector<double> energy(static_cast<std::size_t>(model.dim()));
    std::vector<double> weight(energy.size());
    for (Index k = 0; k < model.dim(); ++k) {
        energy[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
        weight[static_cast<std::size_t>(k)] = std::norm(solver.eigenvectors()(state, k));
    }
    return SpectralDensity::point_masses(std::move(energy), std::move(weight));
}

} // namespace decaykit::spectral
