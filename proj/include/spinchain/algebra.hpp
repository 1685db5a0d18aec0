#ifndef SPINCHAIN_ALGEBRA_HPP
#define SPINCHAIN_ALGEBRA_HPP

#include <Eigen/Dense>

namespace spinchain {

// Validated Kossakowski matrix D = A + iB with A real symmetric and
// B real antisymmetric.
struct KossakowskiSpec {
    int dim = 3;  // 2 or 3
    Eigen::MatrixXcd D;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    double min_eigenvalue = 0.0;
};

// Rotation bringing the antisymmetric part B into the canonical form with
// the only nonzero entries at (1,2) = lambda and (2,1) = -lambda.
struct CanonicalFrame {
    Eigen::Matrix3d R;
    double lambda = 0.0;
    Eigen::Matrix3d A_rot;
    Eigen::Vector3d omega_rot;
};

// Splits D into A + iB and certifies Hermiticity and positive
// semi-definiteness. Throws NotHermitian / NotPositive.
KossakowskiSpec validate_kossakowski(const Eigen::MatrixXcd& D_raw);

// Dual vector beta of an antisymmetric B, with B_{mu nu} = eps_{mu nu gamma} beta_gamma.
Eigen::Vector3d antisymmetric_dual(const Eigen::Matrix3d& B);

// Antisymmetric matrix from its dual vector (inverse of antisymmetric_dual).
Eigen::Matrix3d dual_to_antisymmetric(const Eigen::Vector3d& beta);

// Rotates the dual vector of spec's B onto the +3 axis (Rodrigues about
// beta x e3; identity when beta || e3, rotation by pi about e1 when
// beta || -e3). lambda = |beta| >= 0.
CanonicalFrame canonical_frame(const KossakowskiSpec& spec, const Eigen::Vector3d& omega0);

// Transports an initial covariance into the canonical frame: R Sigma0 R^T.
Eigen::Matrix3d rotate_scenario(const CanonicalFrame& frame, const Eigen::Matrix3d& Sigma0);

}  // namespace spinchain

#endif
