// spectral.hpp - energy densities omega(E) of an initial state
//
// All variants vanish below their threshold emin and are normalized to unit
// total weight at construction; the applied rescaling factor is recorded.

#pragma once

#include "decaykit/model.hpp"

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace decaykit::spectral {

// (N / 2pi) Theta(E - emin) gamma0 / ((E - e0)^2 + gamma0^2 / 4)
struct TruncatedBreitWigner {
    double e0 = 0.0;
    double gamma0 = 0.0;
    double emin = 0.0;
    double norm = 1.0;
};

// Breit-Wigner times (E - emin) / (E - emin + cutoff): vanishes linearly at
// threshold and keeps an integrable 1/E^2 tail.
struct LinearOnsetResonance {
    double e0 = 0.0;
    double gamma0 = 0.0;
    double emin = 0.0;
    double cutoff = 0.0;
    double norm = 1.0;
};

enum class Interpolation { point_masses, piecewise_linear };

struct Tabulated {
    std::vector<double> energy; // strictly increasing
    std::vector<double> weight; // masses, or density samples for piecewise_linear
    Interpolation mode = Interpolation::point_masses;
};

// Density of a discrete level coupled to a continuum through g(E)
// (single-level Friedrichs model), bound states excluded.
struct ContinuumReservoir {
    double level = 0.0;
    double emin = 0.0;
    Coupling coupling = Coupling::flat(1.0, 0.0, 1.0);
    double norm = 1.0;
};

// Pole of the analytic continuation that sits between the real axis and the
// rotated contour: a_exp(t) = residue * exp(-i pole t).
struct PoleTerm {
    cplx pole;
    cplx residue;
    // Distance from the rotated ray {emin - i s, s >= 0} to the nearest
    // singularity of the continuation, used to grade the quadrature.
    double singular_distance = 0.0;
};

class SpectralDensity {
public:
    using Variant = std::variant<TruncatedBreitWigner, LinearOnsetResonance, Tabulated, ContinuumReservoir>;

    static SpectralDensity breit_wigner(double e0, double gamma0, double emin);
    // cutoff defaults to e0 - emin.
    static SpectralDensity linear_onset(double e0, double gamma0, double emin,
                                        std::optional<double> cutoff = std::nullopt);
    static SpectralDensity point_masses(std::vector<double> energy, std::vector<double> weight);
    static SpectralDensity interpolated(std::vector<double> energy, std::vector<double> value);
    static SpectralDensity continuum_reservoir(double level, double emin, Coupling coupling);

    double value(double energy) const;
    double emin() const;
    // Upper end of the support (infinity for the resonance variants).
    double support_upper() const;

    bool has_finite_first_moment() const;
    // Mean energy; DomainError when it diverges.
    double first_moment() const;

    double normalization_factor() const { return applied_factor_; }
    const Variant& variant() const { return v_; }
    template <class T>
    const T* as() const { return std::get_if<T>(&v_); }
    std::string kind_name() const;

    // Continuation of omega off the real axis (threshold step dropped).
    // Only the resonance variants have one; others return nullopt.
    std::optional<PoleTerm> pole_term() const;
    cplx continued_value(cplx energy) const;

private:
    explicit SpectralDensity(Variant v, double applied) : v_(std::move(v)), applied_factor_(applied) {}
    Variant v_;
    double applied_factor_ = 1.0;
};

// Closed-form normalization of the truncated Breit-Wigner line.
double bw_normalization(double e0, double gamma0, double emin);

inline double density_value(const SpectralDensity& d, double energy) { return d.value(energy); }

// Point masses |<state|phi_k>|^2 at the eigenvalues of the full H.
// `state` is a basis index that must belong to the model's subspace.
SpectralDensity density_from_model(const FiniteLevelModel& model, Index state);

// Level shift of the single-level continuum density:
// PV integral of g(E')^2 / (E - E') over the coupling band.
double continuum_shift(const Coupling& coupling, double energy);

} // namespace decaykit::spectral
