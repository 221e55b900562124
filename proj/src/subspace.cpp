#include "decaykit/subspace.hpp"

#include "decaykit/errors.hpp"
#include "decaykit/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace decaykit::subspace {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;
// Below this |x T| the real part of the averaged kernel is summed as a series.
constexpr double kSeriesBranch = 0.5;

void require_discrete(const FiniteLevelModel& m, const char* what) {
    if (m.has_continuum()) throw DomainError(std::string(what) + ": needs a discrete reservoir");
}

double resolve_eta(const FiniteLevelModel& m, std::optional<double> eta) {
    if (m.has_continuum()) return 0.0;
    const double e = eta ? *eta : default_eta(m);
    if (!(e > 0.0)) throw DomainError("discrete reservoir: the t -> inf limit needs eta > 0");
    return e;
}

// coupling diag(f(levels)) coupling^dagger
template <class F>
MatrixXcd reservoir_sandwich(const ReservoirSpectrum& r, F&& f) {
    const Index n = r.coupling.rows();
    Eigen::VectorXcd diag(r.levels.size());
    for (Index l = 0; l < r.levels.size(); ++l) diag(l) = f(r.levels(l));
    if (r.levels.size() == 0) return MatrixXcd::Zero(n, n);
    return r.coupling * diag.asDiagonal() * r.coupling.adjoint();
}

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> kinks;
    bool empty() const { return !(hi > lo); }
};

Band common_band(const Coupling& a, const Coupling& b) {
    Band band{std::max(a.lower(), b.lower()), std::min(a.upper(), b.upper()), {}};
    for (const auto* c : {&a, &b})
        for (double k : c->kinks())
            if (k > band.lo && k < band.hi) band.kinks.push_back(k);
    std::sort(band.kinks.begin(), band.kinks.end());
    return band;
}

// Integral over the common band of g_j g_k kernel(E), with panels no wider
// than `width` (the oscillation scale of the kernel).
template <class F>
cplx band_integral(const Coupling& gj, const Coupling& gk, F&& kernel, double width) {
    const Band band = common_band(gj, gk);
    if (band.empty()) return 0.0;
    std::vector<double> pts{band.lo};
    pts.insert(pts.end(), band.kinks.begin(), band.kinks.end());
    pts.push_back(band.hi);
    const double cap = std::min(width, (band.hi - band.lo) / 16.0);
    auto f = [&](double e) { return gj.amplitude(e) * gk.amplitude(e) * kernel(e); };
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto breaks = quad::graded_breaks(pts[i], pts[i + 1], [cap](double) { return cap; });
        sum += quad::composite(f, breaks).value;
    }
    return sum;
}

// sum_l W(l) P_l, where W(l) = PHQ kernel(QHQ - l) QHP.
template <class K>
MatrixXcd first_order(const FiniteLevelModel& m, const EigenprojectorSet& projectors, K&& kernel, double width) {
    const Index n = m.subspace_dim();
    if (projectors.dim() != n) throw DomainError("first-order potential: projector set does not match the subspace");
    MatrixXcd v = MatrixXcd::Zero(n, n);
    for (const auto& g : projectors.groups) {
        MatrixXcd w(n, n);
        if (m.has_continuum()) {
            const auto& cs = m.continuum().couplings;
            for (Index j = 0; j < n; ++j)
                for (Index k = j; k < n; ++k) {
                    w(j, k) = band_integral(cs[static_cast<std::size_t>(j)], cs[static_cast<std::size_t>(k)],
                                            [&](double e) { return kernel(e - g.lambda); }, width);
                    w(k, j) = w(j, k);
                }
        } else {
            w = reservoir_sandwich(m.reservoir(), [&](double level) { return kernel(level - g.lambda); });
        }
        v += w * g.projector;
    }
    return v;
}

// Trapezoid convolution (A * B)(t_i) on a uniform grid with step h, plus the
// same sum on the every-other-point grid for even i (NaN-free zero otherwise).
struct Convolution {
    std::vector<MatrixXcd> value;
    double richardson = 0.0;
};

Convolution convolve(const std::vector<MatrixXcd>& a, const std::vector<MatrixXcd>& b, double h, Execution exec) {
    const std::size_t count = a.size();
    const Index n = a.front().rows();
    Convolution out;
    out.value.assign(count, MatrixXcd::Zero(n, n));
    std::vector<double> err(count, 0.0);
    for_each_index(count, exec, [&](std::size_t i) {
        if (i == 0) return;
        MatrixXcd fine = 0.5 * (a[i] * b[0] + a[0] * b[i]);
        for (std::size_t k = 1; k < i; ++k) fine += a[i - k] * b[k];
        fine *= h;
        if (i % 2 == 0) {
            MatrixXcd coarse = 0.5 * (a[i] * b[0] + a[0] * b[i]);
            for (std::size_t k = 2; k < i; k += 2) coarse += a[i - k] * b[k];
            coarse *= 2.0 * h;
            err[i] = operator_norm(fine - coarse) / 3.0;
        }
        out.value[i] = std::move(fine);
    });
    for (double e : err) out.richardson = std::max(out.richardson, e);
    return out;
}

} // namespace

Blocks blocks(const FiniteLevelModel& m) {
    Blocks b;
    if (m.has_continuum()) {
        b.php = m.hamiltonian();
        b.phq.resize(m.subspace_dim(), 0);
        b.qhp.resize(0, m.subspace_dim());
        b.qhq.resize(0, 0);
        return b;
    }
    const auto& p = m.subspace();
    const auto& q = m.complement();
    b.php = rows_cols(m.hamiltonian(), p, p);
    b.phq = rows_cols(m.hamiltonian(), p, q);
    b.qhq = rows_cols(m.hamiltonian(), q, q);
    b.qhp = rows_cols(m.hamiltonian(), q, p);
    return b;
}

Index EigenprojectorSet::dim() const { return groups.empty() ? 0 : groups.front().projector.rows(); }

MatrixXcd EigenprojectorSet::reconstruct() const {
    MatrixXcd out = MatrixXcd::Zero(dim(), dim());
    for (const auto& g : groups) out += g.lambda * g.projector;
    return out;
}

EigenprojectorSet eigenprojectors(const MatrixXcd& php, std::optional<double> group_tolerance) {
    if (php.rows() != php.cols() || php.rows() == 0) throw DomainError("eigenprojectors: PHP must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(php);
    if (solver.info() != Eigen::Success) throw NumericError("eigenprojectors: eigensolver failed");
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();

    EigenprojectorSet set;
    set.group_tolerance = group_tolerance ? *group_tolerance : 1e-8 * values.cwiseAbs().maxCoeff();
    if (!(set.group_tolerance >= 0.0)) throw DomainError("eigenprojectors: tolerance must be non-negative");

    // Eigen returns ascending eigenvalues.
    Index start = 0;
    while (start < values.size()) {
        Index end = start + 1;
        while (end < values.size() && values(end) - values(start) <= set.group_tolerance) ++end;
        Eigenprojector g;
        g.multiplicity = end - start;
        g.lambda = values.segment(start, g.multiplicity).mean();
        const auto block = vectors.middleCols(start, g.multiplicity);
        g.projector = block * block.adjoint();
        set.groups.push_back(std::move(g));
        start = end;
    }
    return set;
}

EigenprojectorSet eigenprojectors(const FiniteLevelModel& m, std::optional<double> group_tolerance) {
    return eigenprojectors(blocks(m).php, group_tolerance);
}

double default_eta(const FiniteLevelModel& m) {
    require_discrete(m, "default_eta");
    const auto& levels = m.reservoir().levels;
    if (levels.size() < 2) throw DomainError("default_eta: needs at least two reservoir levels; pass eta explicitly");
    return 3.0 * (levels.maxCoeff() - levels.minCoeff()) / static_cast<double>(levels.size() - 1);
}

MatrixXcd sigma(const FiniteLevelModel& m, double eps, double eta) {
    if (!std::isfinite(eps)) throw DomainError("sigma: energy must be finite");
    if (!(eta >= 0.0)) throw DomainError("sigma: eta must be non-negative");
    const Index n = m.subspace_dim();

    if (m.has_continuum()) {
        const auto& c = m.continuum();
        if (eps == c.emin) throw DomainError("sigma: energy coincides with the continuum threshold");
        MatrixXcd s = MatrixXcd::Zero(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index k = j; k < n; ++k) {
                const auto& gj = c.couplings[static_cast<std::size_t>(j)];
                const auto& gk = c.couplings[static_cast<std::size_t>(k)];
                const Band band = common_band(gj, gk);
                if (band.empty()) continue;
                auto f = [&](double e) { return gj.amplitude(e) * gk.amplitude(e); };
                if ((eps == band.lo || eps == band.hi) && f(eps) != 0.0)
                    throw NumericError("sigma: logarithmic singularity at a coupling band edge");
                double pv;
                if (gj.is_flat() && gk.is_flat()) {
                    pv = f(0.5 * (band.lo + band.hi)) * std::log(std::abs(band.hi - eps) / std::abs(band.lo - eps));
                } else {
                    pv = quad::principal_value(f, band.lo, band.hi, eps, band.kinks).value;
                }
                const double absorptive = (eps > band.lo && eps < band.hi) ? kPi * f(eps) : 0.0;
                s(j, k) = cplx(pv, absorptive);
                s(k, j) = s(j, k);
            }
        return s;
    }

    const auto& r = m.reservoir();
    if (eta == 0.0 && r.levels.size() > 0) {
        const double gap = (r.levels.array() - eps).abs().minCoeff();
        const double scale = std::max({1.0, std::abs(eps), r.levels.cwiseAbs().maxCoeff()});
        if (gap <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
            throw NumericError("sigma: energy collides with a reservoir level at eta = 0", gap);
    }
    const cplx z(eps, eta);
    return reservoir_sandwich(r, [&](double level) { return 1.0 / (level - z); });
}

cplx phase_kernel(double x, double t) {
    const double y = x * t;
    if (y == 0.0) return cplx(0.0, -t);
    // exp(-iy) - 1 = -2 sin^2(y/2) - i sin y, free of cancellation.
    const double h = std::sin(0.5 * y);
    return cplx(-2.0 * h * h, -std::sin(y)) / x;
}

cplx averaged_phase_kernel(double x, double period) {
    const double y = x * period;
    if (y == 0.0) return cplx(0.0, -0.5 * period);
    // ((1 - exp(-iy)) / (iy) - 1) / x = (sin(y)/y - 1 - 2i sin^2(y/2)/y) / x
    double re = 0.0;
    if (std::abs(y) < kSeriesBranch) {
        double term = 1.0;
        for (int k = 1; k < 12; ++k) {
            term *= -y * y / static_cast<double>((2 * k) * (2 * k + 1));
            re += term;
        }
    } else {
        re = std::sin(y) / y - 1.0;
    }
    const double h = std::sin(0.5 * y);
    return cplx(re, -2.0 * h * h / y) / x;
}

MatrixXcd v_parallel_t(const FiniteLevelModel& m, double t, const EigenprojectorSet& projectors) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("v_parallel_t: t must be finite and non-negative");
    const double width = t > 0.0 ? kPi / t : std::numeric_limits<double>::infinity();
    return first_order(m, projectors, [t](double x) { return phase_kernel(x, t); }, width);
}

MatrixXcd v_parallel_time_averaged(const FiniteLevelModel& m, double period, const EigenprojectorSet& projectors) {
    if (!(period > 0.0) || !std::isfinite(period))
        throw DomainError("v_parallel_time_averaged: period must be finite and positive");
    return first_order(m, projectors, [period](double x) { return averaged_phase_kernel(x, period); }, kPi / period);
}

MatrixXcd v_parallel_inf(const FiniteLevelModel& m, const EigenprojectorSet& projectors, std::optional<double> eta) {
    const Index n = m.subspace_dim();
    if (projectors.dim() != n) throw DomainError("v_parallel_inf: projector set does not match the subspace");
    const double e = resolve_eta(m, eta);
    MatrixXcd v = MatrixXcd::Zero(n, n);
    for (const auto& g : projectors.groups) v -= sigma(m, g.lambda, e) * g.projector;
    return v;
}

SubspaceEffectiveHamiltonian SubspaceEffectiveHamiltonian::from_matrix(MatrixXcd h) {
    SubspaceEffectiveHamiltonian out;
    out.mass = 0.5 * (h + h.adjoint());
    out.gamma = kI * (h - h.adjoint());
    out.matrix = std::move(h);
    return out;
}

SubspaceEffectiveHamiltonian effective_hamiltonian(const FiniteLevelModel& m, const EigenprojectorSet& projectors,
                                                   std::optional<double> eta) {
    return SubspaceEffectiveHamiltonian::from_matrix(blocks(m).php + v_parallel_inf(m, projectors, eta));
}

TwoLevelV two_level_v(const FiniteLevelModel& m, std::optional<double> eta) {
    if (m.subspace_dim() != 2) throw DomainError("two_level_v: needs a two-dimensional subspace");
    const MatrixXcd php = blocks(m).php;
    const double h11 = php(0, 0).real(), h22 = php(1, 1).real();
    const cplx h12 = php(0, 1), h21 = php(1, 0);

    TwoLevelV out;
    out.h0 = 0.5 * (h11 + h22);
    out.hz = 0.5 * (h11 - h22);
    out.kappa = std::sqrt(std::norm(h12) + out.hz * out.hz);
    const double tol = 1e-8 * php.cwiseAbs().maxCoeff();
    if (!(out.kappa > tol)) throw DomainError("two_level_v: kappa = 0 (degenerate PHP); use v_parallel_inf");

    const double e = resolve_eta(m, eta);
    out.sigma_plus = sigma(m, out.h0 + out.kappa, e);
    out.sigma_minus = sigma(m, out.h0 - out.kappa, e);
    const auto& sp = out.sigma_plus;
    const auto& sm = out.sigma_minus;
    const double r = out.hz / out.kappa;
    const double k2 = 2.0 * out.kappa;

    out.v.resize(2, 2);
    for (int j = 0; j < 2; ++j) {
        auto& t1 = out.terms[j][0];
        t1 = {-0.5 * (1.0 + r) * sp(j, 0), -0.5 * (1.0 - r) * sm(j, 0), -h21 / k2 * sp(j, 1), h21 / k2 * sm(j, 1)};
        auto& t2 = out.terms[j][1];
        t2 = {-0.5 * (1.0 - r) * sp(j, 1), -0.5 * (1.0 + r) * sm(j, 1), -h12 / k2 * sp(j, 0), h12 / k2 * sm(j, 0)};
        out.v(j, 0) = t1[0] + t1[1] + t1[2] + t1[3];
        out.v(j, 1) = t2[0] + t2[1] + t2[2] + t2[3];
    }
    return out;
}

double operator_norm(const MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<MatrixXcd>(a).singularValues()(0);
}

MatrixXcd kernel_l_exact(const FiniteLevelModel& m, double t) {
    require_discrete(m, "kernel_l_exact");
    const Index n = m.subspace_dim();
    if (t < 0.0) return MatrixXcd::Zero(n, n);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(blocks(m).php);
    if (solver.info() != Eigen::Success) throw NumericError("kernel_l_exact: eigensolver failed");
    MatrixXcd out = MatrixXcd::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
        const double mu = solver.eigenvalues()(a);
        const auto u = solver.eigenvectors().col(a);
        const MatrixXcd w = reservoir_sandwich(m.reservoir(), [&](double level) { return phase_kernel(level - mu, t); });
        out += std::exp(-kI * mu * t) * (u * u.adjoint()) * w;
    }
    return out;
}

KernelSeries kernel_series(const FiniteLevelModel& m, std::span<const double> t_grid, int order, Execution exec) {
    require_discrete(m, "kernel_series");
    if (order < 0 || order > kMaxSeriesOrder) throw DomainError("kernel_series: order must lie in [0, 4]");
    if (t_grid.size() < 2) throw DomainError("kernel_series: need at least two grid points");
    if (t_grid.front() != 0.0) throw DomainError("kernel_series: grid must start at t = 0");
    const double h = t_grid[1] - t_grid[0];
    if (!(h > 0.0)) throw DomainError("kernel_series: grid must be increasing");
    const double t_max = t_grid.back();
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        if (std::abs(t_grid[i] - static_cast<double>(i) * h) > 1e-9 * t_max)
            throw DomainError("kernel_series: grid must be uniform");

    const std::size_t count = t_grid.size();
    const MatrixXcd php = blocks(m).php;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(php);
    if (solver.info() != Eigen::Success) throw NumericError("kernel_series: eigensolver failed");
    const auto& r = m.reservoir();

    std::vector<MatrixXcd> k(count), g(count), u0(count);
    for_each_index(count, exec, [&](std::size_t i) {
        const double t = static_cast<double>(i) * h;
        k[i] = reservoir_sandwich(r, [t](double level) { return std::exp(-kI * level * t); });
        const Eigen::VectorXcd phases = (-kI * t * solver.eigenvalues().cast<cplx>()).array().exp();
        u0[i] = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
        g[i] = -kI * u0[i];
    });

    KernelSeries out;
    auto l = convolve(g, k, h, exec);
    out.trapezoid_error = l.richardson;
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        out.samples[i] = {static_cast<double>(i) * h, k[i], l.value[i], operator_norm(l.value[i])};

    out.u.push_back(u0);
    std::vector<MatrixXcd> term = u0;
    cplx factor = 1.0;
    for (int ord = 1; ord <= order; ++ord) {
        auto next = convolve(l.value, term, h, exec);
        out.trapezoid_error = std::max(out.trapezoid_error, next.richardson);
        term = std::move(next.value);
        factor *= -kI;
        std::vector<MatrixXcd> sum = out.u.back();
        for (std::size_t i = 0; i < count; ++i) sum[i] += factor * term[i];
        out.u.push_back(std::move(sum));
    }
    if (out.trapezoid_error > kTrapezoidWarning) {
        std::ostringstream msg;
        msg << "kernel_series: grid too coarse, trapezoid error estimate " << out.trapezoid_error << " exceeds "
            << kTrapezoidWarning;
        out.warnings.push_back(msg.str());
    }
    return out;
}

} // namespace decaykit::subspace
