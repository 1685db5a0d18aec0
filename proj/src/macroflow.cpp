#include "spinchain/macroflow.hpp"

#include <cmath>

#include "spinchain/algebra.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/ode.hpp"

namespace spinchain {

Eigen::Vector3d macro_rhs(const Eigen::Vector3d& w, const Eigen::Matrix3d& B) {
    const double B12 = B(0, 1), B13 = B(0, 2), B23 = B(1, 2);
    Eigen::Vector3d dw;
    dw(0) = -B12 * w(0) * w(2) + B13 * w(0) * w(1) + B23 * (w(1) * w(1) + w(2) * w(2));
    dw(1) = -B12 * w(1) * w(2) - B23 * w(0) * w(1) - B13 * (w(0) * w(0) + w(2) * w(2));
    dw(2) = B13 * w(1) * w(2) - B23 * w(0) * w(2) + B12 * (w(0) * w(0) + w(1) * w(1));
    return dw;
}

Eigen::Matrix3d macro_rhs_jacobian(const Eigen::Vector3d& w, const Eigen::Matrix3d& B) {
    // Equivalent vector form: dw = |w|^2 beta - (beta . w) w.
    const Eigen::Vector3d beta = antisymmetric_dual(B);
    return 2.0 * beta * w.transpose() - beta.dot(w) * Eigen::Matrix3d::Identity() -
           w * beta.transpose();
}

namespace {

// cosh(a)/cosh(b) without overflow for large |a|, |b|.
double cosh_ratio(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

}  // namespace

Eigen::Vector3d macro_closed_form(const Eigen::Vector3d& omega0, double lambda, double t) {
    const double xi = omega0.norm();
    if (xi < 1e-14) return omega0;  // degenerate length: frozen
    const double ratio = omega0(2) / xi;
    if (std::abs(ratio) >= 1.0 - 1e-15) {
        return omega0;  // exact fixed point (stable or unstable): constant solution
    }
    const double c = std::atanh(ratio) / xi;
    const double u0 = xi * c;
    const double ut = xi * (lambda * t + c);
    Eigen::Vector3d w;
    const double f = cosh_ratio(u0, ut);
    w(0) = f * omega0(0);
    w(1) = f * omega0(1);
    w(2) = xi * std::tanh(ut);
    return w;
}

MacroTrajectory integrate_macro(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& B,
                                const std::vector<double>& t_grid, double tol) {
    OdeRhs rhs = [&B](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy = macro_rhs(y.head<3>(), B);
    };
    OdeSolution sol = integrate_rk45(rhs, omega0, t_grid, tol);

    MacroTrajectory traj;
    traj.times = sol.times;
    traj.states.reserve(sol.states.size());
    for (const auto& y : sol.states) traj.states.push_back(y.head<3>());
    traj.xi = omega0.norm();

    const Eigen::Vector3d beta = antisymmetric_dual(B);
    if (beta.norm() < 1e-14 || traj.xi < 1e-14) {
        traj.stability = Stability::Frozen;
    } else if ((omega0 + traj.xi * beta.normalized()).norm() < 1e-12) {
        // Sitting exactly on the unstable invariant point; honored as constant.
        traj.stability = Stability::Unstable;
    } else {
        traj.stability = Stability::Stable;
    }
    return traj;
}

FixedPointInfo classify_fixed_points(double lambda, double xi) {
    FixedPointInfo info;
    if (lambda == 0.0) {
        info.kind = Stability::Frozen;
        return info;
    }
    const double xi_abs = std::abs(xi);
    const double xi_signed = lambda > 0 ? xi_abs : -xi_abs;
    info.kind = Stability::Stable;
    info.stable_point = Eigen::Vector3d(0, 0, xi_signed);
    info.unstable_point = Eigen::Vector3d(0, 0, -xi_signed);
    info.b = lambda * xi_signed;
    return info;
}

}  // namespace spinchain
