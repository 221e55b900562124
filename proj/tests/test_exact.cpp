#include <doctest.h>

#include "decaykit/errors.hpp"
#include "decaykit/exact.hpp"
#include "decaykit/heff1d.hpp"
#include "test_models.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

using namespace decaykit;
using namespace decaykit::exact;
using Eigen::MatrixXcd;

namespace {

const cplx kI(0, 1);
double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

} // namespace

TEST_SUITE("exact") {

TEST_CASE("propagator: unitarity, group property, dense exponential") {
    std::mt19937 rng(17);
    const MatrixXcd h = testmodels::random_hermitian(6, rng);
    FiniteLevelModel m(h, std::vector<Index>{0, 2});
    const Propagator p(m);
    CHECK(max_abs(p.propagator(0.0).u - MatrixXcd::Identity(6, 6)) < 1e-14);
    for (double t : {0.3, 2.0, 11.0}) {
        const MatrixXcd u = p.propagator(t).u;
        CHECK(max_abs(u.adjoint() * u - MatrixXcd::Identity(6, 6)) < 1e-12);
        CHECK(max_abs(u - MatrixXcd(-kI * t * h).exp()) < 1e-11);
        CHECK(max_abs(p.propagator(t + 1.5).u - u * p.propagator(1.5).u) < 1e-12);
    }
}

TEST_CASE("propagator of a diagonal hamiltonian") {
    MatrixXcd h = MatrixXcd::Zero(3, 3);
    h(0, 0) = -1;
    h(1, 1) = 0.5;
    h(2, 2) = 2;
    const auto u = propagator(FiniteLevelModel(h, std::vector<Index>{0}), 1.3).u;
    for (Index k = 0; k < 3; ++k) CHECK(std::abs(u(k, k) - std::exp(-kI * 1.3 * h(k, k))) < 1e-15);
}

TEST_CASE("amplitude matrix") {
    std::mt19937 rng(2);
    const MatrixXcd h = testmodels::random_hermitian(5, rng);
    FiniteLevelModel m(h, std::vector<Index>{1, 4});
    const Propagator p(m);
    const auto a0 = p.amplitude_matrix(0.0);
    CHECK(max_abs(a0.a - MatrixXcd::Identity(2, 2)) < 1e-14);
    CHECK(max_abs(a0.adot + kI * rows_cols(h, {1, 4}, {1, 4})) < 1e-13);
    const auto a = p.amplitude_matrix(2.2);
    const MatrixXcd u = p.propagator(2.2).u;
    CHECK(max_abs(a.a - rows_cols(u, {1, 4}, {1, 4})) < 1e-14);
    const double h_fd = 1e-4;
    const MatrixXcd fd = (p.amplitude_matrix(2.2 + h_fd).a - p.amplitude_matrix(2.2 - h_fd).a) / (2 * h_fd);
    CHECK(max_abs(fd - a.adot) < 1e-7);
}

TEST_CASE("uncoupled subspace evolves with PHP") {
    std::mt19937 rng(6);
    MatrixXcd h = MatrixXcd::Zero(5, 5);
    h.topLeftCorner(2, 2) = testmodels::random_hermitian(2, rng);
    h.bottomRightCorner(3, 3) = testmodels::random_hermitian(3, rng);
    FiniteLevelModel m(h, std::vector<Index>{0, 1});
    const MatrixXcd php = h.topLeftCorner(2, 2);
    for (double t : {0.5, 3.0}) {
        CHECK(max_abs(amplitude_matrix(m, t).a - MatrixXcd(-kI * t * php).exp()) < 1e-12);
        CHECK(max_abs(exact_heff(m, t).heff.matrix - php) < 1e-12);
    }
    const auto rep = compare_approximations(m, testmodels::linear_grid(0.0, 2.0, 5));
    for (const auto& r : rep.rows) {
        CHECK(r.err_php < 1e-12);
        CHECK(r.err_first_order < 1e-12);
        CHECK(r.err_limit < 1e-12);
        CHECK(r.norm_l == 0.0);
    }
}

TEST_CASE("whole space as subspace returns H") {
    std::mt19937 rng(12);
    const MatrixXcd h = testmodels::random_hermitian(4, rng);
    FiniteLevelModel m(h, std::vector<Index>{0, 1, 2, 3});
    for (double t : {0.1, 1.0, 7.0}) {
        const auto e = exact_heff(m, t);
        CHECK(max_abs(e.heff.matrix - h) < 1e-11);
        CHECK(e.condition == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(max_abs(e.heff.gamma) < 1e-10);
    }
}

TEST_CASE("one-level exact H agrees with the scalar module") {
    std::mt19937 rng(31);
    const MatrixXcd h = testmodels::random_hermitian(8, rng);
    FiniteLevelModel m(h, std::vector<Index>{3});
    const auto d = spectral::density_from_model(m, 3);
    for (double t : {0.2, 0.9, 2.5}) {
        const cplx ex = exact_heff(m, t).heff.matrix(0, 0);
        const cplx sc = heff1d::effective_hamiltonian(d, t).h;
        CHECK(std::abs(ex - sc) <= 1e-10 * std::abs(sc));
        CHECK(std::abs(amplitude_matrix(m, t).a(0, 0) - amplitude::survival_direct(d, t).value) < 1e-13);
    }
}

TEST_CASE("mass and decay matrices reconstruct H") {
    const auto m = testmodels::weak_coupling_model();
    const auto e = exact_heff(m, 1.7).heff;
    CHECK(max_abs(e.mass - cplx(0, 0.5) * e.gamma - e.matrix) < 1e-14);
}

TEST_CASE("singular amplitude matrix") {
    const double pi = std::numbers::pi;
    MatrixXcd h(2, 2);
    h << pi / 2, pi / 2, pi / 2, pi / 2;
    FiniteLevelModel m(h, std::vector<Index>{0});
    CHECK(std::abs(amplitude_matrix(m, 1.0).a(0, 0)) < 1e-15);
    try {
        exact_heff(m, 1.0);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.estimate() > kSingularCondition);
    }
    CHECK_THROWS_AS(compare_approximations(m, std::vector<double>{0.5, 1.0}, {0.1}), NumericError);
    CHECK_NOTHROW(exact_heff(m, 0.5));
}

TEST_CASE("first-order remainder is controlled by the memory kernel") {
    const auto base = testmodels::weak_coupling_model();
    const auto grid = testmodels::linear_grid(0.1, 3.0, 30);
    for (double c : {0.4, 0.2, 0.1}) {
        const auto rep = compare_approximations(base.with_coupling_scaled(c), grid, {0.3});
        CHECK(rep.loy_applicable);
        CHECK(rep.eta == 0.3);
        for (const auto& r : rep.rows) {
            CHECK(r.err_first_order <= 2.0 * rep.max_norm_l * rep.max_norm_l);
            CHECK(r.err_first_order < r.err_php);
            CHECK(std::isfinite(r.err_loy));
        }
    }
}

TEST_CASE("first-order remainder scales as c^4") {
    const auto base = testmodels::weak_coupling_model();
    const auto grid = testmodels::linear_grid(0.1, 3.0, 30);
    std::vector<double> lc, le;
    for (double c : {0.2, 0.1, 0.05, 0.025}) {
        double worst = 0;
        for (const auto& r : compare_approximations(base.with_coupling_scaled(c), grid, {0.3}).rows)
            worst = std::max(worst, r.err_first_order);
        lc.push_back(std::log(c));
        le.push_back(std::log(worst));
    }
    CHECK(testmodels::slope(lc, le) == doctest::Approx(4.0).epsilon(0.3 / 4));
}

TEST_CASE("quasi-continuum decays at the golden-rule rate") {
    const auto qc = testmodels::quasi_continuum();
    const double tau = 1.0 / 0.2;
    CHECK(recurrence_time(qc.model) == doctest::Approx(2 * std::numbers::pi / qc.spacing));
    const Propagator p(qc.model);
    std::vector<double> t, y;
    for (double x = 0.5 * tau; x <= 3 * tau; x += 0.05 * tau) {
        t.push_back(x);
        y.push_back(std::log(std::norm(p.amplitude_matrix(x).a(0, 0))));
    }
    CHECK(-testmodels::slope(t, y) == doctest::Approx(qc.golden_rule).epsilon(0.05));
    const auto set = subspace::eigenprojectors(qc.model);
    const cplx lim = subspace::v_parallel_inf(qc.model, set)(0, 0);
    CHECK(-2 * lim.imag() == doctest::Approx(qc.golden_rule).epsilon(0.02));
}

TEST_CASE("domain errors") {
    FiniteLevelModel cont(MatrixXcd::Constant(1, 1, 5.0), Continuum(0.0, {Coupling::flat(0.2, 0, 10)}));
    CHECK_THROWS_AS(Propagator{cont}, DomainError);
    CHECK_THROWS_AS(recurrence_time(cont), DomainError);
    const auto m = testmodels::weak_coupling_model();
    CHECK_THROWS_AS(compare_approximations(m, std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(compare_approximations(m, std::vector<double>{-1.0}), DomainError);
}

} // TEST_SUITE
