#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spinchain/algebra.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/macroflow.hpp"
#include "spinchain/mesoflow.hpp"

using namespace spinchain;

namespace {

Eigen::Matrix3d canonical_B(double lambda) {
    return dual_to_antisymmetric(Eigen::Vector3d(0.0, 0.0, lambda));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

Eigen::Matrix3d random_sym(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Matrix3d S;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) = gauss(rng);
    return (S + S.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("symplectic form acts as r -> r x omega") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Vector3d omega(gauss(rng), gauss(rng), gauss(rng));
        const Eigen::Vector3d r(gauss(rng), gauss(rng), gauss(rng));
        const Eigen::Matrix3d s = symplectic_form(omega);
        CHECK((s + s.transpose()).norm() < 1e-15);
        CHECK((s * r - r.cross(omega)).norm() < 1e-13);
        CHECK((s * omega).norm() < 1e-13);  // omega spans the kernel
    }
}

TEST_CASE("flow matrices: canonical drift and regrouping identity") {
    const double lambda = 0.8;
    const Eigen::Matrix3d B = canonical_B(lambda);
    const Eigen::Vector3d omega(0.3, -0.2, 0.1);
    const Eigen::Matrix3d A = 2.0 * Eigen::Matrix3d::Identity();
    const auto fm = build_flow_matrices(omega, A, B);

    Eigen::Matrix3d C_expected;
    C_expected << 0, 0, omega(0),
                  0, 0, omega(1),
                  -omega(0), -omega(1), 0;
    C_expected *= -lambda;
    CHECK((fm.C - C_expected).norm() < 1e-13);
    CHECK((fm.F - (fm.sigma * B + fm.C)).norm() < 1e-14);
    CHECK((fm.G - fm.sigma * A * fm.sigma.transpose()).norm() < 1e-14);
    // Equivalence of the raw and regrouped forms on a probe covariance.
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Matrix3d S = random_sym(rng);
        const Eigen::Matrix3d raw = fm.sigma * A * fm.sigma.transpose() +
                                    (fm.sigma * B * S + S * B * fm.sigma) +
                                    (fm.C * S + S * fm.C.transpose());
        const Eigen::Matrix3d grouped = fm.F * S + S * fm.F.transpose() + fm.G;
        CHECK((raw - grouped).norm() < 1e-12);
    }
}

TEST_CASE("A = B = 0 freezes the covariance") {
    const Eigen::Vector3d omega0(0.1, 0.2, 0.3);
    const auto grid = linspace(0.0, 4.0, 9);
    const auto macro = integrate_macro(omega0, Eigen::Matrix3d::Zero(), grid, 1e-12);
    const Eigen::Matrix3d Sigma0 =
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose();
    const auto cov = integrate_covariance(Sigma0, macro, Eigen::Matrix3d::Zero(),
                                          Eigen::Matrix3d::Zero(), 1e-12);
    for (const auto& c : cov) CHECK((c.Sigma - Sigma0).norm() < 1e-13);
}

TEST_CASE("omega^T Sigma omega is a conserved quantity of the joint flow") {
    const Eigen::Vector3d omega0(0.3, 0.0, 0.4);
    const Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d B = canonical_B(1.0);
    const Eigen::Matrix3d Sigma0 =
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose();
    const auto grid = linspace(0.0, 10.0, 41);
    const auto macro = integrate_macro(omega0, B, grid, 1e-12);
    const auto cov = integrate_covariance(Sigma0, macro, A, B, 1e-12);
    const double q0 = omega0.dot(Sigma0 * omega0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::Vector3d w = macro.states[i];
        CHECK(std::abs(w.dot(cov[i].Sigma * w) - q0) < 1e-9);
    }
}

TEST_CASE("reduced Kossakowski and qp frame conversions") {
    Eigen::Matrix3d A;
    A << 1.0, 0.3, 0.1, 0.3, 2.0, -0.2, 0.1, -0.2, 1.5;
    SUBCASE("positive xi") {
        const Eigen::Matrix2d A2 = reduced_kossakowski(A, 0.4);
        CHECK(A2(0, 0) == doctest::Approx(0.4));
        CHECK(A2(0, 1) == doctest::Approx(0.12));
        CHECK(A2(1, 1) == doctest::Approx(0.8));
    }
    SUBCASE("negative xi flips the off-diagonal") {
        const Eigen::Matrix2d A2 = reduced_kossakowski(A, -0.4);
        CHECK(A2(0, 0) == doctest::Approx(0.4));
        CHECK(A2(0, 1) == doctest::Approx(-0.12));
    }
    SUBCASE("frame conversions are mutually inverse") {
        std::mt19937_64 rng(23);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double xi : {0.35, -0.35}) {
            Eigen::Matrix2d S;
            S << 1.0 + gauss(rng) * 0.1, 0.2, 0.2, 1.5;
            const Eigen::Matrix2d back = from_qp_frame(to_qp_frame(S, xi), xi);
            CHECK((back - S).norm() < 1e-13);
            // Scaling: diagonal divides by |xi|, off-diagonal also carries sgn(xi).
            const Eigen::Matrix2d qp = to_qp_frame(S, xi);
            CHECK(qp(0, 0) == doctest::Approx(S(0, 0) / std::abs(xi)));
            CHECK(qp(0, 1) == doctest::Approx(S(0, 1) / xi));
        }
    }
}

TEST_CASE("two-mode closed form solves its own ODE") {
    Eigen::Matrix2d A2;
    A2 << 1.0, 0.3, 0.3, 2.0;
    Eigen::Matrix2d S0;
    S0 << 0.3, 0.05, 0.05, 0.2;
    Eigen::Matrix2d s2;
    s2 << 0, 1, -1, 0;
    for (double b : {0.5, -0.5, 0.0}) {
        const double h = 1e-6;
        for (double t : {0.3, 1.0, 2.5}) {
            const Eigen::Matrix2d fd = (two_mode_closed_form(S0, A2, b, t + h) -
                                        two_mode_closed_form(S0, A2, b, t - h)) /
                                       (2.0 * h);
            const Eigen::Matrix2d St = two_mode_closed_form(S0, A2, b, t);
            // dS/dt = -2b S + sigma A2 sigma^T
            const Eigen::Matrix2d rhs = -2.0 * b * St + s2 * A2 * s2.transpose();
            CHECK((fd - rhs).norm() < 1e-7);
        }
    }
}

TEST_CASE("frozen-oracle value of the two-mode solution") {
    // b = 1, A2 = I, Sigma0 = I, t = 0.5:
    // S = e^{-1} I + (1 - e^{-1})/2 I, entry = 0.68393972058572117.
    const Eigen::Matrix2d S = two_mode_closed_form(Eigen::Matrix2d::Identity(),
                                                   Eigen::Matrix2d::Identity(), 1.0, 0.5);
    CHECK(S(0, 0) == doctest::Approx(0.68393972058572117).epsilon(1e-14));
    CHECK(S(1, 1) == doctest::Approx(0.68393972058572117).epsilon(1e-14));
    CHECK(std::abs(S(0, 1)) < 1e-16);
}

TEST_CASE("asymptotic covariance structure and failure mode") {
    Eigen::Matrix2d A2;
    A2 << 1.0, 0.3, 0.3, 2.0;
    const double b = 0.7;
    const Eigen::Matrix2d Sinf = asymptotic_covariance(A2, b);
    CHECK(Sinf(0, 0) == doctest::Approx(A2(1, 1) / (2 * b)));
    CHECK(Sinf(1, 1) == doctest::Approx(A2(0, 0) / (2 * b)));
    CHECK(Sinf(0, 1) == doctest::Approx(-A2(0, 1) / (2 * b)));
    // Stationarity under the closed form.
    const Eigen::Matrix2d later = two_mode_closed_form(Sinf, A2, b, 3.0);
    CHECK((later - Sinf).norm() < 1e-14);
    CHECK_THROWS_AS(asymptotic_covariance(A2, 0.0), NoStationaryState);
    CHECK_THROWS_AS(asymptotic_covariance(A2, -0.3), NoStationaryState);
}

TEST_CASE("weyl channel matches the closed form and contracts r") {
    Eigen::Matrix2d A2;
    A2 << 1.5, -0.2, -0.2, 0.9;
    const double b = 0.6, t = 1.7;
    const Eigen::Vector2d r(0.4, -1.1);
    const auto ch = weyl_channel(r, A2, b, t);
    CHECK((ch.r_t - std::exp(-b * t) * r).norm() < 1e-14);
    // Y is exactly the inhomogeneous part of the closed form (Sigma0 = 0).
    const Eigen::Matrix2d Y_ref =
        two_mode_closed_form(Eigen::Matrix2d::Zero(), A2, b, t);
    CHECK((ch.Y - Y_ref).norm() < 1e-13);
}

TEST_CASE("integrated flow at the stationary triple equals the reduced solution") {
    const double xi = 0.45, lambda = 1.2, b = lambda * xi;
    const Eigen::Vector3d omega0(0.0, 0.0, xi);
    Eigen::Matrix3d A;
    A << 1.0, 0.25, 0.0, 0.25, 1.3, 0.0, 0.0, 0.0, 1.1;
    const Eigen::Matrix3d B = canonical_B(lambda);
    const Eigen::Matrix3d Sigma0 =
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose();
    const auto grid = linspace(0.0, 6.0, 25);
    const auto macro = integrate_macro(omega0, B, grid, 1e-12);
    const auto cov = integrate_covariance(Sigma0, macro, A, B, 1e-12);
    const Eigen::Matrix2d A2 = reduced_kossakowski(A, xi);
    const Eigen::Matrix2d Sqp0 = to_qp_frame(Sigma0.topLeftCorner<2, 2>(), xi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::Matrix2d qp = to_qp_frame(cov[i].Sigma.topLeftCorner<2, 2>(), xi);
        CHECK((qp - two_mode_closed_form(Sqp0, A2, b, grid[i])).norm() < 1e-9);
        // The 1-2 block decouples from the third mode at the pole.
        CHECK(std::abs(cov[i].Sigma(2, 2) - Sigma0(2, 2)) < 1e-10);
        CHECK(std::abs(cov[i].Sigma(0, 2)) < 1e-10);
        CHECK(std::abs(cov[i].Sigma(1, 2)) < 1e-10);
    }
}

TEST_CASE("third mode variance formula and degeneracy guard") {
    const Eigen::Vector3d omega0(0.24, 0.0, 0.18);
    const Eigen::Matrix3d Sigma0 =
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose();
    const double xi = omega0.norm();
    CHECK(third_mode_variance(omega0, Sigma0) ==
          doctest::Approx(0.25 - xi * xi).epsilon(1e-14));
    CHECK_THROWS_AS(third_mode_variance(Eigen::Vector3d::Zero(), Sigma0),
                    DegenerateLength);
}

TEST_CASE("two-parameter propagator reproduces the integrated flow") {
    const Eigen::Vector3d omega0(0.3, 0.0, 0.4);
    const Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d B = canonical_B(1.0);
    const Eigen::Matrix3d Sigma0 =
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose();
    const auto grid = linspace(0.0, 2.0, 5);
    const auto macro = integrate_macro(omega0, B, grid, 1e-12);
    const auto cov = integrate_covariance(Sigma0, macro, A, B, 1e-12);
    const auto P = propagate_channel(omega0, A, B, 0.0, 2.0, 1e-12);
    const Eigen::Matrix3d predicted = P.X * Sigma0 * P.X.transpose() + P.Y;
    CHECK((predicted - cov.back().Sigma).norm() < 1e-9);
}

TEST_CASE("composition gap vanishes only at the stationary triple") {
    const Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d B = canonical_B(1.0);
    CHECK(composition_gap(Eigen::Vector3d(0, 0, 0.4), A, B, 0.0, 1.0, 2.0, 1e-12) <
          1e-10);
    CHECK(composition_gap(Eigen::Vector3d(0.3, 0, 0.4), A, B, 0.0, 1.0, 2.0, 1e-12) >
          1e-3);
}

TEST_CASE("gaussian characteristic function and admissibility margin") {
    Eigen::Matrix2d S;
    S << 0.5, 0.1, 0.1, 0.5;
    Eigen::Vector2d r(1.0, -2.0);
    CHECK(gaussian_char(S, r) ==
          doctest::Approx(std::exp(-0.5 * r.dot(S * r))).epsilon(1e-14));

    // Vacuum covariance I/2 saturates admissibility for the standard form.
    Eigen::Matrix2d s2;
    s2 << 0, 1, -1, 0;
    const double margin =
        admissibility_margin(Eigen::Matrix2d::Identity() / 2.0, s2);
    CHECK(std::abs(margin) < 1e-12);
    const double bad = admissibility_margin(Eigen::Matrix2d::Identity() / 4.0, s2);
    CHECK(bad < -1e-3);
}
