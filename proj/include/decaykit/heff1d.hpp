// heff1d.hpp - exact one-level effective Hamiltonian h(t) = i a'(t) / a(t)
// and the quantities read off it: instantaneous energy and width, the
// crossover time t_as, late-time asymptotics, surviving populations.

#pragma once

#include "decaykit/amplitude.hpp"

#include <optional>
#include <span>
#include <vector>

namespace decaykit::heff1d {

using amplitude::SpectralDensity;

// A sample is untrusted when |a| is within 10x its error estimate of zero,
// or when the pole and background parts interfere destructively so that
// |a| < kDestructiveFraction * max(|a_exp|, |a_non|).
inline constexpr double kDestructiveFraction = 0.95;

struct EffectiveHamiltonianSample {
    double t = 0.0;
    cplx h;
    double energy = 0.0; // Re h
    double rate = 0.0;   // -2 Im h
    bool trusted = true;
    cplx a;
    cplx adot;
    double amplitude_error = 0.0;
};

EffectiveHamiltonianSample effective_hamiltonian(const SpectralDensity& d, double t,
                                                 double tol = amplitude::kDefaultTolerance);

std::vector<EffectiveHamiltonianSample> effective_hamiltonian_curve(const SpectralDensity& d,
                                                                    std::span<const double> t_grid,
                                                                    double tol = amplitude::kDefaultTolerance,
                                                                    Execution exec = Execution::parallel);

struct TransitionTimeResult {
    double t_as = 0.0;
    double t_lo = 0.0; // final bisection bracket
    double t_hi = 0.0;
    int iterations = 0;
    // |log(|a_exp|^2 / |a_non|^2)| at t_as, i.e. the relative mismatch.
    double residual = 0.0;
    // Further sign changes of |a_exp| - |a_non| found while scanning.
    std::vector<double> later_crossings;
};

// First t > tau where |a_exp| = |a_non| (resonance densities only).
TransitionTimeResult transition_time(const SpectralDensity& d);

struct AsymptoticFit {
    double emin_estimate = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double residual = 0.0;         // rms of |h - model|
    double condition = 0.0;        // of the column-scaled design matrix
    double max_imag_coefficient = 0.0; // from the unconstrained complex fit
    double t_first = 0.0;
    double t_last = 0.0;
    std::size_t samples_used = 0;
    // Re h moves toward emin and |Im h| shrinks across the window.
    bool limits_consistent = false;
};

inline constexpr double kMaxFitCondition = 1e8;

// Least squares of h(t) on {1, -i/t, (-i/t)^2} with real coefficients.
AsymptoticFit asymptotic_fit(std::span<const EffectiveHamiltonianSample> samples,
                             std::optional<double> emin_known = std::nullopt);

// -d log P / d log t by least squares over the given curve.
double tail_exponent(std::span<const amplitude::CurvePoint> curve);
// Same, sampling P on `points` log-spaced times in [t_lo, t_hi].
double tail_exponent(const SpectralDensity& d, double t_lo, double t_hi, std::size_t points = 64);

// Margin standing in for "much greater than" in the source-size condition.
inline constexpr double kAbundanceMargin = 100.0;

struct PopulationEstimate {
    double n0 = 0.0;
    double t = 0.0;
    double survival_probability = 0.0;
    double n_surviving = 0.0; // P(t) n0
    // Crossover-based estimate: P(t_as) ~ exp(-gamma0 t_as). NaN when the
    // density has no resonance pole.
    double t_as = 0.0;
    double threshold = 0.0;    // exp(+gamma0 t_as)
    double n_at_crossover = 0.0; // n0 exp(-gamma0 t_as)
    bool source_sufficient = false; // n0 >= kAbundanceMargin * threshold
};

PopulationEstimate surviving_population(const SpectralDensity& d, double n0, double t);

} // namespace decaykit::heff1d
