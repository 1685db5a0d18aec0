#ifndef SPINCHAIN_MACROFLOW_HPP
#define SPINCHAIN_MACROFLOW_HPP

#include <Eigen/Dense>
#include <vector>

namespace spinchain {

enum class Stability { Stable, Unstable, Frozen };

struct MacroTrajectory {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> states;
    double xi = 0.0;  // conserved Bloch length
    Stability stability = Stability::Frozen;
};

struct FixedPointInfo {
    Stability kind = Stability::Frozen;   // Frozen when lambda = 0
    Eigen::Vector3d stable_point = Eigen::Vector3d::Zero();
    Eigen::Vector3d unstable_point = Eigen::Vector3d::Zero();
    double b = 0.0;  // lambda * xi_signed on the stable branch (> 0 when not frozen)
};

// Right-hand side of the mean-magnetization system for a general
// antisymmetric B. Satisfies omega . d(omega)/dt = 0 identically.
Eigen::Vector3d macro_rhs(const Eigen::Vector3d& omega, const Eigen::Matrix3d& B);

// Jacobian of macro_rhs at omega (used by stability tests).
Eigen::Matrix3d macro_rhs_jacobian(const Eigen::Vector3d& omega, const Eigen::Matrix3d& B);

// Closed-form tanh/cosh solution in the canonical frame (B has only the
// (1,2) entry = lambda). Returns omega0 unchanged when |omega0| < 1e-14.
Eigen::Vector3d macro_closed_form(const Eigen::Vector3d& omega0, double lambda, double t);

// Adaptive integration of the macro system over t_grid.
MacroTrajectory integrate_macro(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& B,
                                const std::vector<double>& t_grid, double tol);

// Stable/unstable asymptotic points for given lambda and xi >= 0.
FixedPointInfo classify_fixed_points(double lambda, double xi);

}  // namespace spinchain

#endif
