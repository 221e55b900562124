// exact.hpp - exact evolution of discrete finite-level models
//
// U(t) from one cached eigendecomposition of H, the subspace amplitude
// matrix A(t) with its analytic derivative, the exact effective Hamiltonian
// H(t) = i A'(t) A(t)^{-1}, and error tables for the approximations.

#pragma once

#include "decaykit/subspace.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decaykit::exact {

using Eigen::MatrixXcd;
using subspace::SubspaceEffectiveHamiltonian;

struct PropagatorSample {
    double t = 0.0;
    MatrixXcd u;
};

struct AmplitudeMatrix {
    double t = 0.0;
    MatrixXcd a;
    MatrixXcd adot;
};

struct ExactHeffSample {
    double t = 0.0;
    SubspaceEffectiveHamiltonian heff;
    double condition = 0.0; // max(||A||, 1) / sigma_min(A): condition relative to the unitary scale
};

// A(t) is treated as singular above this condition number.
inline constexpr double kSingularCondition = 1e12;

// Immutable handle holding the eigendecomposition of H; cheap to copy.
class Propagator {
public:
    explicit Propagator(const FiniteLevelModel& m);

    Index dim() const;
    Index subspace_dim() const;
    const Eigen::VectorXd& energies() const;

    PropagatorSample propagator(double t) const;
    AmplitudeMatrix amplitude_matrix(double t) const;
    ExactHeffSample exact_heff(double t) const;

private:
    struct Data;
    std::shared_ptr<const Data> data_;
};

PropagatorSample propagator(const FiniteLevelModel& m, double t);
AmplitudeMatrix amplitude_matrix(const FiniteLevelModel& m, double t);
ExactHeffSample exact_heff(const FiniteLevelModel& m, double t);

struct ComparisonRow {
    double t = 0.0;
    double err_php = 0.0;
    double err_first_order = 0.0; // PHP + V1(t)
    double err_limit = 0.0;       // PHP + V(inf)
    double err_loy = 0.0;         // PHP - Sigma(H0); NaN unless n = 2
    double norm_l = 0.0;
    double condition = 0.0;
};

struct ComparisonOptions {
    std::optional<double> eta;            // discrete -i0 regularization (default_eta when absent)
    std::optional<double> group_tolerance; // eigenprojector grouping
    Execution exec = Execution::parallel;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double max_norm_l = 0.0;
    bool loy_applicable = false;
    double eta = 0.0;
};

// Operator-norm distance between exact H(t) and each approximant on t_grid.
ComparisonReport compare_approximations(const FiniteLevelModel& m, std::span<const double> t_grid,
                                        const ComparisonOptions& options = {});

// 2 pi / (mean reservoir level spacing); comparison windows should end before half of it.
double recurrence_time(const FiniteLevelModel& m);

} // namespace decaykit::exact
