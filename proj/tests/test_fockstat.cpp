#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinchain/errors.hpp"
#include "spinchain/fockstat.hpp"

using namespace spinchain;

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXcd number_state(int n_max, int n) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    rho(n, n) = 1.0;
    return rho;
}

}  // namespace

TEST_CASE("annihilation operator ladder structure") {
    const auto a = annihilation(10);
    for (int n = 1; n <= 10; ++n) {
        CHECK(std::abs(a(n - 1, n) - std::sqrt(static_cast<double>(n))) < 1e-14);
    }
    // [a, a^dag] = I except for the truncation corner.
    const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
    for (int n = 0; n < 10; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-13);
}

TEST_CASE("jump operator reduces to sqrt(2) a and sqrt(2) a^dag at b = +/-1") {
    const auto Lp = build_liouvillian(1.0, 12);
    const auto a = annihilation(12);
    CHECK((Lp.jump - std::sqrt(2.0) * a).norm() < 1e-13);
    const auto Lm = build_liouvillian(-1.0, 12);
    CHECK((Lm.jump - std::sqrt(2.0) * a.adjoint()).norm() < 1e-13);
}

TEST_CASE("superoperator matches the matrix-form application") {
    const auto L = build_liouvillian(0.7, 8);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(9, 9);
    rho(0, 0) = 0.5;
    rho(3, 3) = 0.5;
    rho(0, 3) = Complex(0.1, 0.05);
    rho(3, 0) = std::conj(rho(0, 3));
    const Eigen::MatrixXcd direct = apply_liouvillian(L, rho);
    // Column-stacked vectorization.
    Eigen::VectorXcd v(81);
    for (int j = 0; j < 9; ++j)
        for (int i = 0; i < 9; ++i) v(j * 9 + i) = rho(i, j);
    const Eigen::VectorXcd w = L.L_super * v;
    for (int j = 0; j < 9; ++j)
        for (int i = 0; i < 9; ++i) CHECK(std::abs(w(j * 9 + i) - direct(i, j)) < 1e-12);
}

TEST_CASE("generator is trace-free and Hermiticity-preserving away from the cut") {
    const auto L = build_liouvillian(1.0, 15);
    for (int n : {0, 3, 7, 10}) {
        const Eigen::MatrixXcd out = apply_liouvillian(L, number_state(15, n));
        CHECK(std::abs(out.trace()) < 1e-12);
        CHECK((out - out.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("b = +1: vacuum is the unique unflagged stationary state") {
    const auto L = build_liouvillian(1.0, 25);
    // Vacuum is annihilated exactly.
    CHECK(apply_liouvillian(L, number_state(25, 0)).norm() < 1e-13);

    const auto states = stationary_states(L, 1e-10);
    int good = 0;
    for (const auto& s : states) {
        if (s.physical && !s.truncation_artifact) {
            ++good;
            CHECK(s.vacuum_fidelity > 1.0 - 1e-9);
            const Eigen::Matrix2d cov = quadrature_covariance(s.rho);
            CHECK((cov - Eigen::Matrix2d::Identity() / 2.0).norm() < 1e-8);
        }
    }
    CHECK(good == 1);
}

TEST_CASE("b = -1: every null vector is a truncation artifact") {
    for (int n_max : {20, 30}) {
        const auto L = build_liouvillian(-1.0, n_max);
        const auto states = stationary_states(L, 1e-10);
        for (const auto& s : states) {
            CHECK((s.truncation_artifact || !s.physical));
        }
    }
}

TEST_CASE("verdicts are stable under truncation refinement") {
    for (int n_max : {20, 30, 40}) {
        const auto Lp = build_liouvillian(1.0, n_max);
        int good = 0;
        for (const auto& s : stationary_states(Lp, 1e-10)) {
            if (s.physical && !s.truncation_artifact) ++good;
        }
        CHECK(good == 1);
    }
}

TEST_CASE("diagonal recursion coefficients") {
    SUBCASE("b = +1 gives rho_{n+1,n+1} = n/(n+1) rho_nn") {
        const auto rep = recursion_analysis(1.0, 20);
        CHECK(rep.max_coeff_error < 1e-12);
        REQUIRE(!rep.recursion_coeffs.empty());
        CHECK(rep.recursion_coeffs[0] == doctest::Approx(0.0));
        CHECK(rep.recursion_coeffs[1] == doctest::Approx(0.5));
        CHECK(rep.recursion_coeffs[2] == doctest::Approx(2.0 / 3.0));
        // rho_11 = 0 * rho_00 kills everything above the vacuum: the
        // normalizable solution is the vacuum itself.
        CHECK(rep.has_normalizable_solution);
        REQUIRE(rep.diagonal_solution.size() >= 2);
        CHECK(rep.diagonal_solution(0) == doctest::Approx(1.0));
        CHECK(std::abs(rep.diagonal_solution(1)) < 1e-12);
    }
    SUBCASE("b = -1 forces rho_00 = 0 and admits no normalizable solution") {
        const auto rep = recursion_analysis(-1.0, 20);
        CHECK(rep.rho00_forced_zero);
        CHECK(!rep.has_normalizable_solution);
    }
}

TEST_CASE("quadrature covariance of number states") {
    // <q^2> = <p^2> = n + 1/2 for |n><n|, <qp>_sym = 0.
    for (int n : {0, 1, 4}) {
        const Eigen::Matrix2d cov = quadrature_covariance(number_state(12, n));
        CHECK(cov(0, 0) == doctest::Approx(n + 0.5).epsilon(1e-12));
        CHECK(cov(1, 1) == doctest::Approx(n + 0.5).epsilon(1e-12));
        CHECK(std::abs(cov(0, 1)) < 1e-13);
    }
}

TEST_CASE("n_max lower bound enforced") {
    CHECK_THROWS_AS(build_liouvillian(1.0, 3), ConfigError);
}
