// Small model builders shared by the unit tests and the acceptance binary.
#pragma once

#include "decaykit/model.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testmodels {

using decaykit::cplx;
using decaykit::FiniteLevelModel;
using decaykit::Index;
using Eigen::MatrixXcd;

inline MatrixXcd random_hermitian(Index n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    MatrixXcd a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return (a + a.adjoint()) / 2.0;
}

inline MatrixXcd random_unitary(Index n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    MatrixXcd a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return Eigen::HouseholderQR<MatrixXcd>(a).householderQ();
}

// U diag(values) U^dagger for a random unitary U.
inline MatrixXcd hermitian_with_spectrum(const std::vector<double>& values, std::mt19937& rng) {
    const auto n = static_cast<Index>(values.size());
    const MatrixXcd u = random_unitary(n, rng);
    Eigen::VectorXcd d(n);
    for (Index i = 0; i < n; ++i) d(i) = values[static_cast<std::size_t>(i)];
    return u * d.asDiagonal() * u.adjoint();
}

// Random model whose PHP block has the requested spectrum; the reservoir is random.
inline FiniteLevelModel model_with_php_spectrum(const std::vector<double>& values, Index reservoir,
                                                std::mt19937& rng) {
    const auto n = static_cast<Index>(values.size());
    MatrixXcd h = random_hermitian(n + reservoir, rng);
    h.topLeftCorner(n, n) = hermitian_with_spectrum(values, rng);
    std::vector<Index> p;
    for (Index i = 0; i < n; ++i) p.push_back(i);
    return FiniteLevelModel(h, p);
}

struct QuasiContinuum {
    FiniteLevelModel model;
    double spacing;
    double coupling;
    double golden_rule; // 2 pi |c|^2 / spacing
};

// Level e1 coupled with constant c to `levels` equally spaced levels on [0, band].
inline QuasiContinuum quasi_continuum(Index levels = 500, double e1 = 5.0, double gamma = 0.2,
                                      double band = 10.0) {
    const double spacing = band / static_cast<double>(levels - 1);
    const double c = std::sqrt(gamma * spacing / (2.0 * std::numbers::pi));
    MatrixXcd h = MatrixXcd::Zero(levels + 1, levels + 1);
    h(0, 0) = e1;
    for (Index l = 0; l < levels; ++l) {
        h(l + 1, l + 1) = static_cast<double>(l) * spacing;
        h(0, l + 1) = c;
        h(l + 1, 0) = c;
    }
    return {FiniteLevelModel(h, {0}), spacing, c, 2.0 * std::numbers::pi * c * c / spacing};
}

// Two subspace states coupled to four reservoir levels; scale with with_coupling_scaled.
inline FiniteLevelModel weak_coupling_model() {
    MatrixXcd h = MatrixXcd::Zero(6, 6);
    h(0, 0) = 1.0;
    h(1, 1) = 1.7;
    h(0, 1) = cplx(0.2, 0.1);
    h(1, 0) = std::conj(h(0, 1));
    for (Index l = 2; l < 6; ++l) {
        h(l, l) = 0.5 * static_cast<double>(l);
        h(0, l) = 0.1 * static_cast<double>(l);
        h(1, l) = cplx(0.05, 0.1 * static_cast<double>(l - 3));
        h(l, 0) = std::conj(h(0, l));
        h(l, 1) = std::conj(h(1, l));
    }
    return FiniteLevelModel(h, {0, 1});
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return t;
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace testmodels
