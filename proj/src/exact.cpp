#include "decaykit/exact.hpp"

#include "decaykit/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace decaykit::exact {

namespace {

constexpr cplx kI(0.0, 1.0);

} // namespace

struct Propagator::Data {
    Eigen::VectorXd energies;
    MatrixXcd vectors;
    MatrixXcd subspace_rows; // V restricted to the subspace basis (n x dim)
};

Propagator::Propagator(const FiniteLevelModel& m) {
    if (m.has_continuum()) throw DomainError("propagator: continuum models have no finite propagator");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m.hamiltonian());
    if (solver.info() != Eigen::Success) throw NumericError("propagator: eigendecomposition of H failed");
    auto d = std::make_shared<Data>();
    d->energies = solver.eigenvalues();
    d->vectors = solver.eigenvectors();
    const Index n = m.subspace_dim();
    d->subspace_rows.resize(n, m.dim());
    for (Index i = 0; i < n; ++i) d->subspace_rows.row(i) = d->vectors.row(m.subspace()[static_cast<std::size_t>(i)]);
    data_ = std::move(d);
}

Index Propagator::dim() const { return data_->vectors.rows(); }
Index Propagator::subspace_dim() const { return data_->subspace_rows.rows(); }
const Eigen::VectorXd& Propagator::energies() const { return data_->energies; }

PropagatorSample Propagator::propagator(double t) const {
    if (!std::isfinite(t)) throw DomainError("propagator: t must be finite");
    const Eigen::VectorXcd phases = (-kI * t * data_->energies.cast<cplx>()).array().exp();
    return {t, data_->vectors * phases.asDiagonal() * data_->vectors.adjoint()};
}

AmplitudeMatrix Propagator::amplitude_matrix(double t) const {
    if (!std::isfinite(t)) throw DomainError("amplitude_matrix: t must be finite");
    const Eigen::VectorXcd phases = (-kI * t * data_->energies.cast<cplx>()).array().exp();
    const Eigen::VectorXcd dphases = -kI * data_->energies.cast<cplx>().cwiseProduct(phases);
    const auto& vp = data_->subspace_rows;
    return {t, vp * phases.asDiagonal() * vp.adjoint(), vp * dphases.asDiagonal() * vp.adjoint()};
}

ExactHeffSample Propagator::exact_heff(double t) const {
    const auto am = amplitude_matrix(t);
    // A is a block of a unitary, so ||A|| <= 1 and 1 / sigma_min bounds its
    // condition number; unlike sigma_max / sigma_min it also sees a 1x1 zero.
    const auto sv = Eigen::JacobiSVD<MatrixXcd>(am.a).singularValues();
    const double smallest = sv(sv.size() - 1);
    const double cond = smallest > 0.0 ? std::max(sv(0), 1.0) / smallest : std::numeric_limits<double>::infinity();
    if (!(cond <= kSingularCondition)) {
        std::ostringstream msg;
        msg << "exact_heff: amplitude matrix is singular at t = " << t << " (condition " << cond << ")";
        throw NumericError(msg.str(), cond);
    }
    // H A = i A'  <=>  A^T H^T = i A'^T
    const MatrixXcd ht = am.a.transpose().fullPivLu().solve((kI * am.adot).transpose());
    return {t, SubspaceEffectiveHamiltonian::from_matrix(ht.transpose()), cond};
}

PropagatorSample propagator(const FiniteLevelModel& m, double t) { return Propagator(m).propagator(t); }
AmplitudeMatrix amplitude_matrix(const FiniteLevelModel& m, double t) { return Propagator(m).amplitude_matrix(t); }
ExactHeffSample exact_heff(const FiniteLevelModel& m, double t) { return Propagator(m).exact_heff(t); }

double recurrence_time(const FiniteLevelModel& m) {
    if (m.has_continuum()) throw DomainError("recurrence_time: needs a discrete reservoir");
    const auto& levels = m.reservoir().levels;
    if (levels.size() < 2) throw DomainError("recurrence_time: needs at least two reservoir levels");
    const double spacing = (levels.maxCoeff() - levels.minCoeff()) / static_cast<double>(levels.size() - 1);
    return 2.0 * std::numbers::pi / spacing;
}

ComparisonReport compare_approximations(const FiniteLevelModel& m, std::span<const double> t_grid,
                                        const ComparisonOptions& options) {
    if (t_grid.empty()) throw DomainError("compare_approximations: empty time grid");
    for (double t : t_grid)
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("compare_approximations: times must be finite and >= 0");

    const Propagator prop(m);
    const auto projectors = subspace::eigenprojectors(m, options.group_tolerance);
    const MatrixXcd php = subspace::blocks(m).php;
    const Index n = m.subspace_dim();

    ComparisonReport report;
    const bool coupled = m.reservoir().levels.size() > 0;
    report.eta = coupled ? (options.eta ? *options.eta : subspace::default_eta(m)) : 0.0;
    const MatrixXcd limit =
        coupled ? MatrixXcd(php + subspace::v_parallel_inf(m, projectors, report.eta)) : php;
    report.loy_applicable = n == 2;
    MatrixXcd loy;
    if (report.loy_applicable) {
        const double h0 = 0.5 * (php(0, 0).real() + php(1, 1).real());
        loy = coupled ? MatrixXcd(php - subspace::sigma(m, h0, report.eta)) : php;
    }

    report.rows.resize(t_grid.size());
    std::vector<std::string> failures(t_grid.size());
    for_each_index(t_grid.size(), options.exec, [&](std::size_t i) {
        const double t = t_grid[i];
        try {
            const auto ex = prop.exact_heff(t);
            const MatrixXcd& h = ex.heff.matrix;
            ComparisonRow& row = report.rows[i];
            row.t = t;
            row.condition = ex.condition;
            row.err_php = subspace::operator_norm(h - php);
            row.err_first_order = subspace::operator_norm(h - php - subspace::v_parallel_t(m, t, projectors));
            row.err_limit = subspace::operator_norm(h - limit);
            row.err_loy = report.loy_applicable ? subspace::operator_norm(h - loy)
                                                : std::numeric_limits<double>::quiet_NaN();
            row.norm_l = subspace::operator_norm(subspace::kernel_l_exact(m, t));
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw NumericError(f);
    for (const auto& row : report.rows) report.max_norm_l = std::max(report.max_norm_l, row.norm_l);
    return report;
}

} // namespace decaykit::exact
