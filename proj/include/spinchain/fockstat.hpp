#ifndef SPINCHAIN_FOCKSTAT_HPP
#define SPINCHAIN_FOCKSTAT_HPP

#include <Eigen/Dense>
#include <vector>

namespace spinchain {

// Truncated number-basis Liouvillian for the one-jump generator
// L^T[rho] = (q + i b p) rho (q - i b p) - 1/2 {(q - i b p)(q + i b p), rho}.
struct FockLiouvillian {
    int n_max = 0;
    double b = 0.0;
    Eigen::MatrixXcd jump;     // q + i b p, (n_max+1) x (n_max+1)
    Eigen::MatrixXcd L_super;  // (n_max+1)^2 square, column-stacked convention
};

struct StationaryCandidate {
    Eigen::MatrixXcd rho;
    double singular_value = 0.0;
    bool truncation_artifact = false;  // > 1% population in the top 10% of levels
    bool physical = false;             // Hermitian, normalizable, PSD within tolerance
    double vacuum_fidelity = 0.0;      // <0| rho |0>
};

struct RecursionReport {
    double b = 0.0;
    int n_max = 0;
    std::vector<double> recursion_coeffs;  // rho_{n+1,n+1} = coeff[n] * rho_{nn} (b = +1)
    double max_coeff_error = 0.0;          // deviation from n/(n+1)
    bool rho00_forced_zero = false;
    bool has_normalizable_solution = false;
    Eigen::VectorXd diagonal_solution;     // normalized when it exists
};

// Truncated annihilation operator and quadratures.
Eigen::MatrixXcd annihilation(int n_max);

FockLiouvillian build_liouvillian(double b, int n_max);

// Applies L^T to a density matrix (matrix form, without vectorization).
Eigen::MatrixXcd apply_liouvillian(const FockLiouvillian& L, const Eigen::MatrixXcd& rho);

// Null space of L_super by SVD; Hermitized, trace-normalized candidates with
// truncation-artifact flags. Singular values <= tol * ||L||_2 count as zero.
std::vector<StationaryCandidate> stationary_states(const FockLiouvillian& L, double tol);

// Diagonal-subspace recursion analysis for b = +1 / -1.
RecursionReport recursion_analysis(double b, int n_max);

// q,p covariance matrix [[<q^2>, <qp>_sym], [., <p^2>]] of a Fock-space state.
Eigen::Matrix2d quadrature_covariance(const Eigen::MatrixXcd& rho);

}  // namespace spinchain

#endif
