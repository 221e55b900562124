// amplitude.hpp - survival amplitude a(t) = integral of omega(E) exp(-iEt) dE
//
// Two independent routes:
//   * direct: oscillation-aware panels on the real energy axis (every variant);
//   * contour: the ray emin - i s plus the enclosed resonance pole (resonance
//     variants, t > 0), which yields the split a = a_exp + a_non.

#pragma once

#include "decaykit/parallel.hpp"
#include "decaykit/quadrature.hpp"
#include "decaykit/spectral.hpp"

#include <span>
#include <vector>

namespace decaykit::amplitude {

using spectral::SpectralDensity;

inline constexpr double kDefaultTolerance = 1e-10;

struct SurvivalSample {
    double t = 0.0;
    cplx a;
    cplx adot;
    double error = 0.0; // absolute error estimate of a
};

struct AmplitudeSplit {
    double t = 0.0;
    cplx a_exp;
    cplx a_non;
    double error = 0.0; // quadrature error estimate of a_non

    cplx total() const { return a_exp + a_non; }
};

// Contour evaluation of a(t) and da/dt, split into pole and background parts.
struct ContourSample {
    AmplitudeSplit value;
    AmplitudeSplit derivative;
};

quad::Estimate<cplx> survival_direct(const SpectralDensity& d, double t, double tol = kDefaultTolerance,
                                     Execution exec = Execution::parallel);

AmplitudeSplit survival_contour(const SpectralDensity& d, double t);
ContourSample survival_contour_sample(const SpectralDensity& d, double t);

quad::Estimate<cplx> survival_derivative(const SpectralDensity& d, double t, double tol = kDefaultTolerance);

// a(t) and da/dt from the best route for the variant (contour for resonances).
SurvivalSample survival_sample(const SpectralDensity& d, double t, double tol = kDefaultTolerance);

struct CurvePoint {
    double t = 0.0;
    double probability = 0.0;
};

std::vector<CurvePoint> survival_probability_curve(const SpectralDensity& d, std::span<const double> t_grid,
                                                   double tol = kDefaultTolerance,
                                                   Execution exec = Execution::parallel);

} // namespace decaykit::amplitude
