#include <doctest.h>

#include "decaykit/errors.hpp"
#include "decaykit/exact.hpp"
#include "decaykit/subspace.hpp"
#include "test_models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

using namespace decaykit;
using namespace decaykit::subspace;
using boost::math::quadrature::gauss_kronrod;
using Eigen::MatrixXcd;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

// K(s) = PHQ exp(-is QHQ) QHP by a dense matrix exponential.
MatrixXcd kernel_dense(const Blocks& b, double s) { return b.phq * MatrixXcd(-kI * s * b.qhq).exp() * b.qhp; }

// Entrywise adaptive quadrature of a matrix-valued integrand on [0, t].
template <class F>
MatrixXcd integrate_matrix(F&& f, Index n, double t) {
    MatrixXcd out(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            auto re = [&](double s) { return f(s)(i, j).real(); };
            auto im = [&](double s) { return f(s)(i, j).imag(); };
            out(i, j) = cplx(gauss_kronrod<double, 31>::integrate(re, 0.0, t, 12, 1e-13),
                             gauss_kronrod<double, 31>::integrate(im, 0.0, t, 12, 1e-13));
        }
    return out;
}

std::vector<std::vector<double>> spectra() {
    return {{1.0, 2.0},      {0.5, 0.5},           {-1.0, 0.3, 2.0}, {1.0, 1.0, 1.0},
            {0.1, 0.1, 0.9}, {-2, -1, 0, 1, 2},    {1, 1, 2, 2, 3},  {0.4, 0.4, 0.4, -1, 3}};
}

} // namespace

TEST_SUITE("subspace") {

TEST_CASE("block decomposition") {
    std::mt19937 rng(21);
    SUBCASE("reassembles H") {
        const MatrixXcd h = testmodels::random_hermitian(5, rng);
        FiniteLevelModel m(h, std::vector<Index>{1, 3});
        const auto b = blocks(m);
        CHECK(b.php.rows() == 2);
        CHECK(b.qhq.rows() == 3);
        CHECK(max_abs(b.php - rows_cols(h, {1, 3}, {1, 3})) == 0.0);
        CHECK(max_abs(b.phq - rows_cols(h, {1, 3}, {0, 2, 4})) == 0.0);
        CHECK(max_abs(b.qhp - b.phq.adjoint()) == 0.0);
        CHECK(max_abs(b.qhq - b.qhq.adjoint()) == 0.0);
    }
    SUBCASE("block diagonal H has no coupling") {
        MatrixXcd h = MatrixXcd::Zero(4, 4);
        h.topLeftCorner(2, 2) = testmodels::random_hermitian(2, rng);
        h.bottomRightCorner(2, 2) = testmodels::random_hermitian(2, rng);
        const auto b = blocks(FiniteLevelModel(h, std::vector<Index>{0, 1}));
        CHECK(max_abs(b.phq) == 0.0);
    }
    SUBCASE("two levels plus one") {
        MatrixXcd h(3, 3);
        h << 1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 5.0;
        const auto b = blocks(FiniteLevelModel(h, std::vector<Index>{0, 1}));
        CHECK(b.phq(0, 0) == cplx(0.3));
        CHECK(b.phq(1, 0) == cplx(0.4));
        CHECK(b.qhq(0, 0) == cplx(5.0));
    }
}

TEST_CASE("projector algebra over random models") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> pick(0, 2);
    std::normal_distribution<double> g;
    int models = 0;
    for (int r = 0; r < 100; ++r) {
        const int n = std::array<int, 3>{2, 3, 5}[static_cast<std::size_t>(pick(rng))];
        std::vector<double> spec(static_cast<std::size_t>(n));
        for (auto& v : spec) v = g(rng);
        if (r % 3 == 1) std::fill(spec.begin(), spec.end(), spec[0]);  // fully degenerate
        if (r % 3 == 2) spec[1] = spec[0];                             // mixed
        const MatrixXcd php = testmodels::hermitian_with_spectrum(spec, rng);
        const auto set = eigenprojectors(php);
        CHECK(set.dim() == n);
        MatrixXcd sum = MatrixXcd::Zero(n, n);
        Index mult = 0;
        for (std::size_t i = 0; i < set.groups.size(); ++i) {
            const auto& pi = set.groups[i].projector;
            CHECK(max_abs(pi * pi - pi) <= 1e-10);
            CHECK(max_abs(pi - pi.adjoint()) <= 1e-10);
            for (std::size_t j = 0; j < set.groups.size(); ++j)
                if (i != j) CHECK(max_abs(pi * set.groups[j].projector) <= 1e-10);
            sum += pi;
            mult += set.groups[i].multiplicity;
        }
        CHECK(mult == n);
        CHECK(max_abs(sum - MatrixXcd::Identity(n, n)) <= 1e-10);
        CHECK(max_abs(set.reconstruct() - php) <= 1e-10);
        if (r % 3 == 1) CHECK(set.groups.size() == 1);
        ++models;
    }
    CHECK(models == 100);
}

TEST_CASE("eigenprojector special cases") {
    const auto single = eigenprojectors(MatrixXcd(2.0 * MatrixXcd::Identity(3, 3)));
    REQUIRE(single.groups.size() == 1);
    CHECK(single.groups[0].lambda == doctest::Approx(2.0));
    CHECK(max_abs(single.groups[0].projector - MatrixXcd::Identity(3, 3)) < 1e-14);

    MatrixXcd d = MatrixXcd::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    const auto diag = eigenprojectors(d);
    REQUIRE(diag.groups.size() == 2);
    CHECK(std::abs(diag.groups[0].projector(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(diag.groups[1].projector(1, 1) - 1.0) < 1e-14);

    // Close pair merged only with a loose tolerance.
    d(1, 1) = 1.0 + 1e-6;
    CHECK(eigenprojectors(d).groups.size() == 2);
    CHECK(eigenprojectors(d, 1e-5).groups.size() == 1);
}

TEST_CASE("self-energy of a single reservoir level") {
    MatrixXcd h(3, 3);
    h << 1.0, 0.1, cplx(0.2, 0.1), 0.1, 2.0, 0.3, cplx(0.2, -0.1), 0.3, 4.0;
    FiniteLevelModel m(h, std::vector<Index>{0, 1});
    Eigen::VectorXcd c(2);
    c << cplx(0.2, 0.1), 0.3;
    for (double eta : {0.0, 0.05}) {
        const double eps = 1.5;
        const MatrixXcd expect = c * c.adjoint() / (4.0 - eps - kI * eta);
        CHECK(max_abs(sigma(m, eps, eta) - expect) < 1e-14);
    }
    CHECK_THROWS_AS(sigma(m, 4.0, 0.0), NumericError);
    CHECK_THROWS_AS(sigma(m, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(default_eta(m), DomainError);
}

TEST_CASE("self-energy vanishes without coupling") {
    MatrixXcd h = MatrixXcd::Zero(4, 4);
    h(0, 0) = 1;
    h(2, 2) = 2;
    h(3, 3) = 3;
    FiniteLevelModel m(h, std::vector<Index>{0, 1});
    CHECK(max_abs(sigma(m, 0.5, 0.1)) == 0.0);
    const auto p = eigenprojectors(m);
    CHECK(max_abs(v_parallel_inf(m, p)) == 0.0);
    CHECK(max_abs(v_parallel_t(m, 3.0, p)) == 0.0);
}

TEST_CASE("continuum self-energy: golden rule and principal value") {
    const double gamma = 0.2;
    MatrixXcd php = MatrixXcd::Constant(1, 1, 5.0);
    FiniteLevelModel flat(php, Continuum(0.0, {Coupling::flat(gamma, 0, 10)}));
    const cplx s = sigma(flat, 5.0)(0, 0);
    CHECK(s.imag() == doctest::Approx(gamma / 2).epsilon(1e-12));
    CHECK(std::abs(s.real()) < 1e-14);
    const cplx s3 = sigma(flat, 3.0)(0, 0);
    CHECK(s3.real() == doctest::Approx(gamma / (2 * kPi) * std::log(7.0 / 3.0)).epsilon(1e-12));

    // The same band tabulated with interior nodes takes the quadrature route.
    const double g = std::sqrt(gamma / (2 * kPi));
    FiniteLevelModel tab(php, Continuum(0.0, {Coupling::tabulated({0, 2.5, 7, 10}, {g, g, g, g})}));
    CHECK(std::abs(sigma(tab, 3.0)(0, 0) - s3) < 1e-9);
    CHECK(std::abs(sigma(tab, 7.0)(0, 0) - sigma(flat, 7.0)(0, 0)) < 1e-9);

    CHECK_THROWS_AS(sigma(flat, 0.0), DomainError);
    CHECK_THROWS_AS(sigma(flat, 10.0), NumericError);
}

TEST_CASE("phase kernels against direct quadrature") {
    for (double t : {0.5, 7.0}) {
        for (double y : {1e-9, 1e-4, 1e-3, 0.49, 0.51, 3.0, -2.0, 40.0}) {
            const double x = y / t;
            CAPTURE(y);
            auto re = [&](double s) { return std::sin(-x * s); };
            auto im = [&](double s) { return -std::cos(x * s); };
            const cplx expect(gauss_kronrod<double, 61>::integrate(re, 0.0, t, 12, 1e-14),
                              gauss_kronrod<double, 61>::integrate(im, 0.0, t, 12, 1e-14));
            CHECK(std::abs(phase_kernel(x, t) - expect) <= 1e-14 * std::abs(expect));
            auto are = [&](double s) { return phase_kernel(x, s).real(); };
            auto aim = [&](double s) { return phase_kernel(x, s).imag(); };
            const cplx avg = cplx(gauss_kronrod<double, 61>::integrate(are, 0.0, t, 12, 1e-14),
                                  gauss_kronrod<double, 61>::integrate(aim, 0.0, t, 12, 1e-14)) / t;
            CHECK(std::abs(averaged_phase_kernel(x, t) - avg) <= 1e-13 * std::abs(avg));
        }
    }
    CHECK(phase_kernel(0.0, 2.0) == cplx(0, -2.0));
    CHECK(averaged_phase_kernel(0.0, 2.0) == cplx(0, -1.0));
}

TEST_CASE("first-order potential equals its defining integral") {
    const auto m = testmodels::weak_coupling_model().with_coupling_scaled(0.5);
    const auto b = blocks(m);
    const auto p = eigenprojectors(m);
    const MatrixXcd php = b.php;
    for (double t : {0.3, 2.0, 6.5}) {
        CAPTURE(t);
        const MatrixXcd expect = -kI * integrate_matrix(
                                           [&](double s) {
                                               return MatrixXcd(kernel_dense(b, s) * MatrixXcd(kI * s * php).exp());
                                           },
                                           2, t);
        CHECK(max_abs(v_parallel_t(m, t, p) - expect) < 1e-11);
    }
    CHECK(max_abs(v_parallel_t(m, 0.0, p)) == 0.0);
}

TEST_CASE("one level: first order and its limit") {
    MatrixXcd h(2, 2);
    h << 1.0, cplx(0.3, 0.2), cplx(0.3, -0.2), 2.5;
    FiniteLevelModel m(h, std::vector<Index>{0});
    const auto p = eigenprojectors(m);
    const double c2 = std::norm(cplx(0.3, 0.2));
    for (double t : {0.5, 4.0}) {
        const cplx expect = c2 * (std::exp(-kI * 1.5 * t) - 1.0) / 1.5;
        CHECK(std::abs(v_parallel_t(m, t, p)(0, 0) - expect) < 1e-15);
    }
    CHECK_THROWS_AS(v_parallel_inf(m, p), DomainError);
    const cplx lim = v_parallel_inf(m, p, 0.1)(0, 0);
    CHECK(std::abs(lim + c2 / (1.5 - cplx(0, 0.1))) < 1e-15);
    CHECK(std::abs(lim + sigma(m, 1.0, 0.1)(0, 0)) < 1e-15);
}

TEST_CASE("time-averaged potential equals the average of V1") {
    const auto m = testmodels::weak_coupling_model().with_coupling_scaled(0.5);
    const auto p = eigenprojectors(m);
    const double period = 9.0;
    const MatrixXcd avg = integrate_matrix([&](double t) { return v_parallel_t(m, t, p); }, 2, period) / period;
    CHECK(max_abs(v_parallel_time_averaged(m, period, p) - avg) < 1e-11);
}

TEST_CASE("continuum V1(t) approaches its limit") {
    MatrixXcd php = MatrixXcd::Constant(1, 1, 5.0);
    FiniteLevelModel m(php, Continuum(0.0, {Coupling::flat(0.2, 0, 10)}));
    const auto p = eigenprojectors(m);
    const MatrixXcd lim = v_parallel_inf(m, p);
    CHECK(std::abs(lim(0, 0) - cplx(0, -0.1)) < 1e-12);
    const double e50 = max_abs(v_parallel_t(m, 50.0, p) - lim);
    const double e500 = max_abs(v_parallel_t(m, 500.0, p) - lim);
    CHECK(e500 < 2e-4);
    CHECK(e500 < e50);
}

TEST_CASE("coupling scaling is exactly quadratic") {
    const auto base = testmodels::weak_coupling_model();
    const auto p = eigenprojectors(base);
    for (double c : {0.1, 0.37, 3.0}) {
        const auto m = base.with_coupling_scaled(c);
        for (double t : {0.5, 3.0}) {
            const MatrixXcd ref = v_parallel_t(base, t, p);
            CHECK(max_abs(v_parallel_t(m, t, p) / (c * c) - ref) <= 1e-12 * max_abs(ref));
        }
        const MatrixXcd ref = v_parallel_inf(base, p, 0.3);
        CHECK(max_abs(v_parallel_inf(m, p, 0.3) / (c * c) - ref) <= 1e-12 * max_abs(ref));
    }
}

TEST_CASE("limit potential is dissipative above threshold") {
    std::mt19937 rng(8);
    std::normal_distribution<double> g;
    for (int r = 0; r < 30; ++r) {
        const MatrixXcd php = testmodels::random_hermitian(3, rng) + 5.0 * MatrixXcd::Identity(3, 3);
        std::vector<Coupling> cs;
        for (int k = 0; k < 3; ++k) {
            const double a = 0.2 * g(rng), b = 0.2 * g(rng);
            cs.push_back(Coupling::tabulated({0, 6, 12}, {a, b, a + b}));
        }
        FiniteLevelModel m(php, Continuum(0.0, std::move(cs)));
        const auto p = eigenprojectors(m);
        const MatrixXcd v = v_parallel_inf(m, p);
        const MatrixXcd gam = kI * (v - v.adjoint());
        for (const auto& grp : p.groups) {
            if (grp.lambda <= 0.0 || grp.lambda >= 12.0) continue;
            const MatrixXcd block = grp.projector * gam * grp.projector;
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (block + block.adjoint()));
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        }
    }
}

TEST_CASE("two-level formula equals the general limit") {
    std::mt19937 rng(1);
    double worst = 0, ratio = 0;
    for (int r = 0; r < 100; ++r) {
        FiniteLevelModel m(testmodels::random_hermitian(6, rng), std::vector<Index>{0, 1});
        const auto tl = two_level_v(m, 0.3);
        worst = std::max(worst, max_abs(tl.v - v_parallel_inf(m, eigenprojectors(m), 0.3)));
        const double s = std::max(operator_norm(tl.sigma_plus), operator_norm(tl.sigma_minus));
        for (const auto& row : tl.terms)
            for (const auto& cell : row)
                for (const auto& term : cell) ratio = std::max(ratio, std::abs(term) / s);
    }
    CHECK(worst <= 1e-10);
    CHECK(ratio <= 10.0);
}

TEST_CASE("two-level reductions") {
    std::mt19937 rng(4);
    MatrixXcd h = testmodels::random_hermitian(5, rng);
    SUBCASE("degenerate PHP: LOY") {
        h(0, 0) = h(1, 1) = 0.7;
        h(0, 1) = h(1, 0) = 0.0;
        FiniteLevelModel m(h, std::vector<Index>{0, 1});
        CHECK_THROWS_AS(two_level_v(m, 0.3), DomainError);
        CHECK(max_abs(v_parallel_inf(m, eigenprojectors(m), 0.3) + sigma(m, 0.7, 0.3)) < 1e-15);
    }
    SUBCASE("diagonal PHP: WW per level") {
        h(0, 0) = 0.2;
        h(1, 1) = 1.9;
        h(0, 1) = h(1, 0) = 0.0;
        FiniteLevelModel m(h, std::vector<Index>{0, 1});
        const auto tl = two_level_v(m, 0.3);
        const MatrixXcd s1 = sigma(m, 0.2, 0.3), s2 = sigma(m, 1.9, 0.3);
        CHECK(std::abs(tl.v(0, 0) + s1(0, 0)) < 1e-14);
        CHECK(std::abs(tl.v(1, 1) + s2(1, 1)) < 1e-14);
        CHECK(std::abs(tl.v(0, 1) + s2(0, 1)) < 1e-14);
        CHECK(std::abs(tl.v(1, 0) + s1(1, 0)) < 1e-14);
    }
    SUBCASE("wrong dimension") {
        FiniteLevelModel m(h, std::vector<Index>{0});
        CHECK_THROWS_AS(two_level_v(m, 0.3), DomainError);
    }
}

TEST_CASE("effective hamiltonian splits into mass and decay matrices") {
    const auto m = testmodels::weak_coupling_model();
    const auto e = effective_hamiltonian(m, eigenprojectors(m), 0.3);
    CHECK(max_abs(e.mass - cplx(0.5) * (e.matrix + e.matrix.adjoint())) < 1e-15);
    CHECK(max_abs(e.mass - cplx(0, 0.5) * e.gamma - e.matrix) < 1e-14);
    CHECK(max_abs(e.gamma - e.gamma.adjoint()) < 1e-15);
}

TEST_CASE("memory kernel L(t)") {
    const auto m = testmodels::weak_coupling_model().with_coupling_scaled(0.2);
    const auto b = blocks(m);
    const MatrixXcd php = b.php;
    for (double t : {0.01, 0.8, 3.0}) {
        // L = G * K with the retarded propagator G(t) = -i exp(-it PHP).
        const MatrixXcd expect = -kI * integrate_matrix(
            [&](double s) { return MatrixXcd(MatrixXcd(-kI * (t - s) * php).exp() * kernel_dense(b, s)); }, 2, t);
        CHECK(max_abs(kernel_l_exact(m, t) - expect) < 1e-12);
    }
    CHECK(max_abs(kernel_l_exact(m, -1.0)) == 0.0);
    CHECK(max_abs(kernel_l_exact(m, 0.0)) == 0.0);
}

TEST_CASE("kernel series") {
    const auto m = testmodels::weak_coupling_model().with_coupling_scaled(0.2);
    const auto grid = testmodels::linear_grid(0.0, 4.0, 401);
    const auto ks = kernel_series(m, grid, 2);
    REQUIRE(ks.samples.size() == grid.size());
    REQUIRE(ks.u.size() == 3);
    CHECK(ks.samples[1].norm_l < 1e-3);
    CHECK(ks.warnings.empty());
    CHECK(ks.trapezoid_error < kTrapezoidWarning);

    const MatrixXcd php = blocks(m).php;
    const exact::Propagator prop(m);
    double dl = 0;
    std::array<double, 3> du{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dl = std::max(dl, max_abs(ks.samples[i].l - kernel_l_exact(m, grid[i])));
        CHECK(max_abs(ks.u[0][i] - MatrixXcd(-kI * grid[i] * php).exp()) < 1e-12);
        const MatrixXcd a = prop.amplitude_matrix(grid[i]).a;
        for (std::size_t o = 0; o < 3; ++o) du[o] = std::max(du[o], max_abs(ks.u[o][i] - a));
    }
    CHECK(dl < 10 * ks.trapezoid_error + 1e-12);
    CHECK(du[1] < du[0]);
    CHECK(du[2] < du[1]);
}

TEST_CASE("kernel series on a coarse grid warns") {
    const auto m = testmodels::weak_coupling_model();
    const auto ks = kernel_series(m, testmodels::linear_grid(0.0, 8.0, 9), 1);
    CHECK_FALSE(ks.warnings.empty());
    CHECK(ks.trapezoid_error > kTrapezoidWarning);
}

TEST_CASE("kernel series preconditions") {
    const auto m = testmodels::weak_coupling_model();
    const std::vector<double> shifted{0.1, 0.2, 0.3};
    const std::vector<double> uneven{0.0, 0.1, 0.3};
    const auto ok = testmodels::linear_grid(0.0, 1.0, 11);
    CHECK_THROWS_AS(kernel_series(m, shifted, 1), DomainError);
    CHECK_THROWS_AS(kernel_series(m, uneven, 1), DomainError);
    CHECK_THROWS_AS(kernel_series(m, ok, kMaxSeriesOrder + 1), DomainError);
    CHECK_THROWS_AS(kernel_series(m, ok, -1), DomainError);
    FiniteLevelModel cont(MatrixXcd::Constant(1, 1, 5.0), Continuum(0.0, {Coupling::flat(0.2, 0, 10)}));
    CHECK_THROWS_AS(kernel_series(cont, ok, 1), DomainError);
}

} // TEST_SUITE
