#ifndef SPINCHAIN_MESOFLOW_HPP
#define SPINCHAIN_MESOFLOW_HPP

#include <Eigen/Dense>
#include <vector>

#include "spinchain/macroflow.hpp"

namespace spinchain {

enum class Frame { Full3, ReducedQP };

struct CovarianceState {
    Eigen::MatrixXd Sigma;  // 3x3 (Full3) or 2x2 (ReducedQP), symmetric
    double t = 0.0;
    Frame frame = Frame::Full3;
};

// Affine covariance propagator along a macro trajectory:
// Sigma(t) = X Sigma(t0) X^T + Y.
struct ChannelPropagator {
    double t0 = 0.0, t = 0.0;
    Eigen::Matrix3d X = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d Y = Eigen::Matrix3d::Zero();
};

struct FlowMatrices {
    Eigen::Matrix3d sigma;  // symplectic form at omega
    Eigen::Matrix3d C;      // drift from the mean-field part of B
    Eigen::Matrix3d F;      // sigma B + C, so that dSigma/dt = F Sigma + Sigma F^T + G
    Eigen::Matrix3d G;      // sigma A sigma^T
};

// Symplectic form sigma(omega): sigma_12 = omega3, sigma_13 = -omega2,
// sigma_23 = omega1.
Eigen::Matrix3d symplectic_form(const Eigen::Vector3d& omega);

// C_{mu nu} = sum eps_{mu mu' nu} B_{mu' nu'} omega_{nu'}, plus the regrouped
// drift/noise pair (F, G) of the covariance flow.
FlowMatrices build_flow_matrices(const Eigen::Vector3d& omega, const Eigen::Matrix3d& A,
                                 const Eigen::Matrix3d& B);

// Integrates dSigma/dt = sigma A sigma^T + (sigma B Sigma + Sigma B sigma)
//                        + (C Sigma + Sigma C^T)
// jointly with the macro flow, sampled at macro.times. All state-dependent
// matrices are evaluated at the time-evolved macro triple.
std::vector<CovarianceState> integrate_covariance(const Eigen::Matrix3d& Sigma0,
                                                  const MacroTrajectory& macro,
                                                  const Eigen::Matrix3d& A,
                                                  const Eigen::Matrix3d& B, double tol);

// Reduced 2x2 Kossakowski real part: [[A11 |xi|, A12 xi], [A12 xi, A22 |xi|]].
Eigen::Matrix2d reduced_kossakowski(const Eigen::Matrix3d& A, double xi);

// Covariance block of F(s_1), F(s_2) converted to the rescaled (q, p) frame:
// q = F(s1)/sqrt|xi|, p = sgn(xi) F(s2)/sqrt|xi|.
Eigen::Matrix2d to_qp_frame(const Eigen::Matrix2d& Sigma12_block, double xi);
Eigen::Matrix2d from_qp_frame(const Eigen::Matrix2d& Sigma_qp, double xi);

// Sigma_t = e^{-2bt} Sigma0 - (1 - e^{-2bt})/(2b) sigma A2 sigma, with
// sigma = [[0,1],[-1,0]]. b = 0 handled by the continuous extension.
Eigen::Matrix2d two_mode_closed_form(const Eigen::Matrix2d& Sigma0, const Eigen::Matrix2d& A2,
                                     double b, double t);

// Sigma_inf = (1/2b) [[A2_22, -A2_12], [-A2_12, A2_11]]. Throws
// NoStationaryState for b <= 0.
Eigen::Matrix2d asymptotic_covariance(const Eigen::Matrix2d& A2, double b);

struct WeylChannel {
    Eigen::Vector2d r_t;
    Eigen::Matrix2d Y;
};

// r_t = e^{-bt} r; Y_t = (1 - e^{-2bt})/(2b) sigma A2 sigma^T.
WeylChannel weyl_channel(const Eigen::Vector2d& r, const Eigen::Matrix2d& A2, double b,
                         double t);

// Two-parameter propagator (X, Y) between absolute times t_start and t_end
// along the macro trajectory started at omega0 at time 0.
ChannelPropagator propagate_channel(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& A,
                                    const Eigen::Matrix3d& B, double t_start, double t_end,
                                    double tol);

// Failure of the elapsed-time-indexed maps Phi_tau to compose:
// max over the fixed probe set {I/4, I/4 - w0 w0^T, diag(0.3, 0.2, 0.25)} of
// ||Phi_{t-t0}(Sigma) - Phi_{t-s}(Phi_{s-t0}(Sigma))||_F.
double composition_gap(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& A,
                       const Eigen::Matrix3d& B, double t0, double s, double t, double tol);

// s^2 = (1/xi^2) omega0^T Sigma0 omega0. Throws DegenerateLength if |omega0| < 1e-14.
double third_mode_variance(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& Sigma0);

// Characteristic function exp(-(r, Sigma r)/2).
double gaussian_char(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& r);

// Minimum eigenvalue of Sigma + (i/2) sigma(omega); admissibility monitor,
// reported rather than asserted along time-dependent flows.
double admissibility_margin(const Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& sigma_form);

}  // namespace spinchain

#endif
