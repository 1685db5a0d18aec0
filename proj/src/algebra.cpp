#include "spinchain/algebra.hpp"

#include <cmath>

#include "spinchain/errors.hpp"

namespace spinchain {

KossakowskiSpec validate_kossakowski(const Eigen::MatrixXcd& D_raw) {
    const Eigen::Index n = D_raw.rows();
    if ((n != 2 && n != 3) || D_raw.cols() != n) {
        throw ConfigError("Kossakowski matrix must be 2x2 or 3x3");
    }
    if (!D_raw.allFinite()) {
        throw ConfigError("Kossakowski matrix has non-finite entries");
    }
    const double herm_err = (D_raw - D_raw.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-10) {
        throw NotHermitian("Kossakowski matrix deviates from Hermiticity by " +
                           std::to_string(herm_err));
    }
    KossakowskiSpec spec;
    spec.dim = static_cast<int>(n);
    spec.D = (D_raw + D_raw.adjoint()) / 2.0;  // exact Hermitian representative
    spec.A = ((spec.D + spec.D.transpose()) / 2.0).real();
    spec.B = ((spec.D - spec.D.transpose()) / std::complex<double>(0, 2)).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spec.D, Eigen::EigenvaluesOnly);
    spec.min_eigenvalue = es.eigenvalues().minCoeff();
    if (spec.min_eigenvalue < -1e-10) {
        throw NotPositive("Kossakowski matrix has minimum eigenvalue " +
                          std::to_string(spec.min_eigenvalue));
    }
    return spec;
}

Eigen::Vector3d antisymmetric_dual(const Eigen::Matrix3d& B) {
    return {B(1, 2), -B(0, 2), B(0, 1)};
}

Eigen::Matrix3d dual_to_antisymmetric(const Eigen::Vector3d& beta) {
    Eigen::Matrix3d B;
    B << 0, beta(2), -beta(1),
        -beta(2), 0, beta(0),
        beta(1), -beta(0), 0;
    return B;
}

namespace {

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& k) {
    Eigen::Matrix3d K;
    K << 0, -k(2), k(1),
        k(2), 0, -k(0),
        -k(1), k(0), 0;
    return K;
}

}  // namespace

CanonicalFrame canonical_frame(const KossakowskiSpec& spec, const Eigen::Vector3d& omega0) {
    if (spec.dim != 3) {
        throw ConfigError("canonical_frame requires a 3x3 Kossakowski matrix");
    }
    const Eigen::Vector3d beta = antisymmetric_dual(spec.B);
    const double lambda = beta.norm();

    CanonicalFrame frame;
    frame.lambda = lambda;
    if (lambda < 1e-14) {
        frame.R = Eigen::Matrix3d::Identity();  // B = 0: frozen macro dynamics
    } else {
        const Eigen::Vector3d bhat = beta / lambda;
        const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();
        const Eigen::Vector3d axis = bhat.cross(e3);
        const double sin_th = axis.norm();
        const double cos_th = bhat.dot(e3);
        if (sin_th < 1e-14) {
            if (cos_th > 0) {
                frame.R = Eigen::Matrix3d::Identity();
            } else {
                // beta || -e3: rotate by pi about e1.
                frame.R = Eigen::Matrix3d::Identity();
                frame.R(1, 1) = -1;
                frame.R(2, 2) = -1;
            }
        } else {
            const Eigen::Matrix3d K = cross_matrix(axis / sin_th);
            frame.R = Eigen::Matrix3d::Identity() + sin_th * K + (1 - cos_th) * K * K;
        }
    }
    frame.A_rot = frame.R * spec.A * frame.R.transpose();
    frame.omega_rot = frame.R * omega0;
    return frame;
}

Eigen::Matrix3d rotate_scenario(const CanonicalFrame& frame, const Eigen::Matrix3d& Sigma0) {
    Eigen::Matrix3d out = frame.R * Sigma0 * frame.R.transpose();
    return (out + out.transpose()) / 2.0;
}

}  // namespace spinchain
