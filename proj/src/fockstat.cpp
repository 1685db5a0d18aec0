#include "spinchain/fockstat.hpp"

#include <cmath>

#include "spinchain/errors.hpp"

namespace spinchain {

using Complex = std::complex<double>;
static const Complex kI(0.0, 1.0);

Eigen::MatrixXcd annihilation(int n_max) {
    const int d = n_max + 1;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

FockLiouvillian build_liouvillian(double b, int n_max) {
    if (n_max < 4) throw ConfigError("build_liouvillian requires n_max >= 4");
    FockLiouvillian L;
    L.n_max = n_max;
    L.b = b;
    const int d = n_max + 1;
    const Eigen::MatrixXcd a = annihilation(n_max);
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd q = (a + ad) / std::sqrt(2.0);
    const Eigen::MatrixXcd p = (a - ad) / (kI * std::sqrt(2.0));
    L.jump = q + kI * b * p;
    const Eigen::MatrixXcd Jd = L.jump.adjoint();
    const Eigen::MatrixXcd JdJ = Jd * L.jump;

    // vec(A X B) = (B^T kron A) vec(X), column stacking.
    const int D = d * d;
    L.L_super = Eigen::MatrixXcd::Zero(D, D);
    auto kron_add = [&](const Eigen::MatrixXcd& Bt, const Eigen::MatrixXcd& A, Complex w) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (Bt(i, j) != 0.0)
                    L.L_super.block(i * d, j * d, d, d) += w * Bt(i, j) * A;
    };
    kron_add(Jd.transpose(), L.jump, 1.0);            // J rho J^dag
    kron_add(Eigen::MatrixXcd::Identity(d, d), JdJ, -0.5);  // -1/2 J^dag J rho
    kron_add(JdJ.transpose(), Eigen::MatrixXcd::Identity(d, d), -0.5);  // -1/2 rho J^dag J
    return L;
}

Eigen::MatrixXcd apply_liouvillian(const FockLiouvillian& L, const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd Jd = L.jump.adjoint();
    const Eigen::MatrixXcd JdJ = Jd * L.jump;
    return L.jump * rho * Jd - 0.5 * (JdJ * rho + rho * JdJ);
}

std::vector<StationaryCandidate> stationary_states(const FockLiouvillian& L, double tol) {
    const int d = L.n_max + 1;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(L.L_super, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = tol * sv(0);

    std::vector<StationaryCandidate> out;
    for (int k = static_cast<int>(sv.size()) - 1; k >= 0 && sv(k) <= cutoff; --k) {
        StationaryCandidate cand;
        cand.singular_value = sv(k);
        Eigen::MatrixXcd rho =
            Eigen::Map<const Eigen::MatrixXcd>(svd.matrixV().col(k).data(), d, d);
        rho = ((rho + rho.adjoint()) / 2.0).eval();
        const double tr = rho.trace().real();
        if (std::abs(tr) <= tol) continue;  // traceless kernel direction, not a state
        rho /= tr;
        cand.rho = rho;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        cand.physical = es.eigenvalues().minCoeff() >= -1e-8;

        // > 1% population in the top 10% of levels flags a truncation artifact.
        const int top_start = d - std::max(1, d / 10);
        double top_mass = 0.0;
        for (int n = top_start; n < d; ++n) top_mass += std::abs(rho(n, n).real());
        cand.truncation_artifact = top_mass > 0.01;
        cand.vacuum_fidelity = rho(0, 0).real();
        out.push_back(std::move(cand));
    }
    return out;
}

RecursionReport recursion_analysis(double b, int n_max) {
    if (b != 1.0 && b != -1.0) throw ConfigError("recursion_analysis requires b = +1 or -1");
    RecursionReport rep;
    rep.b = b;
    rep.n_max = n_max;
    const FockLiouvillian L = build_liouvillian(b, n_max);
    const int d = n_max + 1;

    // Restrict L^T to the diagonal subspace: M(k, n) = coefficient of rho_{nn}
    // in (L^T[rho])_{kk}.
    Eigen::MatrixXd M(d, d);
    for (int n = 0; n < d; ++n) {
        Eigen::MatrixXcd e_n = Eigen::MatrixXcd::Zero(d, d);
        e_n(n, n) = 1.0;
        const Eigen::MatrixXcd im = apply_liouvillian(L, e_n);
        for (int k = 0; k < d; ++k) M(k, n) = im(k, k).real();
    }

    if (b > 0) {
        // Row n: M(n, n+1) rho_{n+1,n+1} + M(n, n) rho_{nn} = 0, away from the
        // truncation boundary.
        rep.recursion_coeffs.resize(d - 2);
        for (int n = 0; n + 2 < d; ++n) {
            rep.recursion_coeffs[n] = -M(n, n) / M(n, n + 1);
            rep.max_coeff_error =
                std::max(rep.max_coeff_error,
                         std::abs(rep.recursion_coeffs[n] -
                                  static_cast<double>(n) / (n + 1)));
        }
        // Forward solve from rho_00 = 1: the n = 0 coefficient is 0, so all
        // excited populations vanish and the vacuum is the unique solution.
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
        diag(0) = 1.0;
        for (int n = 0; n + 2 < d; ++n) diag(n + 1) = rep.recursion_coeffs[n] * diag(n);
        const double total = diag.sum();
        rep.has_normalizable_solution = total > 1e-12;
        if (rep.has_normalizable_solution) rep.diagonal_solution = diag / total;
        rep.rho00_forced_zero = false;
    } else {
        // Row 0 reads -rho_00 = 0; the upward recursion then kills every
        // diagonal entry, so no normalizable solution exists.
        double off_row0 = 0.0;
        for (int n = 1; n < d; ++n) off_row0 = std::max(off_row0, std::abs(M(0, n)));
        rep.rho00_forced_zero = std::abs(M(0, 0)) > 1e-12 && off_row0 < 1e-12;
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
        diag(0) = 0.0;  // forced by row 0
        rep.recursion_coeffs.resize(d - 2);
        for (int n = 1; n + 1 < d; ++n) {
            // Row n couples rho_{n-1,n-1} and rho_{nn}.
            rep.recursion_coeffs[n - 1] = -M(n, n - 1) / M(n, n);
            diag(n) = rep.recursion_coeffs[n - 1] * diag(n - 1);
        }
        rep.has_normalizable_solution = diag.sum() > 1e-12;
        rep.diagonal_solution = diag;
    }
    return rep;
}

Eigen::Matrix2d quadrature_covariance(const Eigen::MatrixXcd& rho) {
    const int n_max = static_cast<int>(rho.rows()) - 1;
    const Eigen::MatrixXcd a = annihilation(n_max);
    const Eigen::MatrixXcd q = (a + a.adjoint()) / std::sqrt(2.0);
    const Eigen::MatrixXcd p = (a - a.adjoint()) / (kI * std::sqrt(2.0));
    const double mq = (rho * q).trace().real();
    const double mp = (rho * p).trace().real();
    Eigen::Matrix2d S;
    S(0, 0) = (rho * q * q).trace().real() - mq * mq;
    S(1, 1) = (rho * p * p).trace().real() - mp * mp;
    S(0, 1) = S(1, 0) = 0.5 * (rho * (q * p + p * q)).trace().real() - mq * mp;
    return S;
}

}  // namespace spinchain
