// subspace.hpp - reduction of the dynamics to an n-dimensional subspace
//
// Block decomposition of H, eigenprojectors of PHP, the self-energy
// Sigma(eps), the first-order potential V1(t) and its limit, the explicit
// two-level formulas, and the kernel series for the projected propagator.

#pragma once

#include "decaykit/model.hpp"
#include "decaykit/parallel.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decaykit::subspace {

using Eigen::MatrixXcd;

struct Blocks {
    MatrixXcd php;
    MatrixXcd phq; // empty for continuum models
    MatrixXcd qhq;
    MatrixXcd qhp;
};

Blocks blocks(const FiniteLevelModel& m);

struct Eigenprojector {
    double lambda = 0.0; // group mean eigenvalue
    MatrixXcd projector;
    Index multiplicity = 0;
};

struct EigenprojectorSet {
    std::vector<Eigenprojector> groups;
    double group_tolerance = 0.0;

    Index dim() const;
    MatrixXcd reconstruct() const; // sum lambda_j P_j
};

// Eigenvalues closer than `group_tolerance` to the first member of their
// group share one projector. Default tolerance: 1e-8 ||PHP||.
EigenprojectorSet eigenprojectors(const MatrixXcd& php, std::optional<double> group_tolerance = std::nullopt);
EigenprojectorSet eigenprojectors(const FiniteLevelModel& m, std::optional<double> group_tolerance = std::nullopt);

// 3x the mean level spacing of QHQ (discrete models with at least two reservoir levels).
double default_eta(const FiniteLevelModel& m);

// Sigma(eps) = PHQ (QHQ - eps - i eta)^{-1} QHP. For a continuum reservoir
// eta is ignored and the -i0 limit is taken exactly (principal value + i pi g g).
MatrixXcd sigma(const FiniteLevelModel& m, double eps, double eta = 0.0);

// (exp(-i x t) - 1) / x, evaluated without cancellation; -i t at x = 0.
cplx phase_kernel(double x, double t);
// Time average over [0, T] of phase_kernel(x, t).
cplx averaged_phase_kernel(double x, double period);

// V1(t) = -i integral_0^t K(s) exp(is PHP) ds
//       = sum_j PHQ [(exp(-it(QHQ - l_j)) - 1) / (QHQ - l_j)] QHP P_j,
// which tends to -sum_j Sigma(l_j) P_j as t -> inf.
MatrixXcd v_parallel_t(const FiniteLevelModel& m, double t, const EigenprojectorSet& projectors);
// (1/T) integral of V1(t) over [0, T]; a convergent stand-in for the t -> inf
// limit of a discrete reservoir.
MatrixXcd v_parallel_time_averaged(const FiniteLevelModel& m, double period, const EigenprojectorSet& projectors);

// V = -sum_j Sigma(l_j) P_j. Discrete reservoirs use eta (default_eta when absent).
MatrixXcd v_parallel_inf(const FiniteLevelModel& m, const EigenprojectorSet& projectors,
                         std::optional<double> eta = std::nullopt);

struct SubspaceEffectiveHamiltonian {
    MatrixXcd matrix;
    MatrixXcd mass;  // M = (H + H^dagger) / 2
    MatrixXcd gamma; // Gamma = i (H - H^dagger)

    static SubspaceEffectiveHamiltonian from_matrix(MatrixXcd h);
};

// PHP + v_parallel_inf.
SubspaceEffectiveHamiltonian effective_hamiltonian(const FiniteLevelModel& m, const EigenprojectorSet& projectors,
                                                   std::optional<double> eta = std::nullopt);

struct TwoLevelV {
    MatrixXcd v;
    // terms[j][k] holds the four summands of v_jk in the order
    // Sigma_jk(H0 + kappa), Sigma_jk(H0 - kappa), Sigma_jl(H0 + kappa), Sigma_jl(H0 - kappa).
    std::array<std::array<std::array<cplx, 4>, 2>, 2> terms{};
    double h0 = 0.0;
    double hz = 0.0;
    double kappa = 0.0;
    MatrixXcd sigma_plus;  // Sigma(H0 + kappa)
    MatrixXcd sigma_minus; // Sigma(H0 - kappa)
};

// The explicit two-level expressions for v_jk. Throws DomainError when
// kappa vanishes (degenerate PHP; use v_parallel_inf).
TwoLevelV two_level_v(const FiniteLevelModel& m, std::optional<double> eta = std::nullopt);

struct KernelSample {
    double t = 0.0;
    MatrixXcd k;
    MatrixXcd l;
    double norm_l = 0.0; // operator 2-norm of L(t)
};

struct KernelSeries {
    std::vector<KernelSample> samples;
    // u[m][i]: U(t_i) summed through order m of the series.
    std::vector<std::vector<MatrixXcd>> u;
    // Largest Richardson estimate of the trapezoid error over all convolutions.
    double trapezoid_error = 0.0;
    std::vector<std::string> warnings;
};

inline constexpr int kMaxSeriesOrder = 4;
inline constexpr double kTrapezoidWarning = 1e-4;

// Discrete models only. t_grid must be uniform and start at 0.
KernelSeries kernel_series(const FiniteLevelModel& m, std::span<const double> t_grid, int order,
                           Execution exec = Execution::parallel);

// L(t) = (G * K)(t) in closed form from the eigen-data of PHP and QHQ.
MatrixXcd kernel_l_exact(const FiniteLevelModel& m, double t);

double operator_norm(const MatrixXcd& a);

} // namespace decaykit::subspace
