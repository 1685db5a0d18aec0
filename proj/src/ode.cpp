#include "spinchain/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order error weights (b - bhat).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Weights of the order-4 continuous extension (Hairer/Norsett/Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

OdeSolution integrate_rk45(const OdeRhs& rhs, const Eigen::VectorXd& y0,
                           const std::vector<double>& t_grid, double tol) {
    const Eigen::Index n = y0.size();
    OdeSolution out;
    out.times = t_grid;
    out.states.reserve(t_grid.size());
    if (t_grid.empty()) return out;

    double t = t_grid.front();
    Eigen::VectorXd y = y0;
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Eigen::VectorXd ytmp(n), ynew(n), yerr(n);

    rhs(t, y, k1);
    out.states.push_back(y);
    std::size_t next_sample = 1;
    const double t_end = t_grid.back();
    if (next_sample >= t_grid.size()) return out;

    double h = (t_end - t) / 100.0;
    if (h <= 0.0) h = 1e-6;
    const double h_min = std::max((t_end - t), 1.0) * 1e-14;
    double err_prev = 1.0;

    while (t < t_end) {
        if (t + h > t_end) h = t_end - t;

        rhs(t + c2 * h, y + h * (a21 * k1), k2);
        rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
        rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
        rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);  // FSAL
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = yerr[i] / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (std::isfinite(err) && err <= 1.0) {
            const double t_new = t + h;
            // Dense output over [t, t_new] at the method's own order.
            if (next_sample < t_grid.size() &&
                t_grid[next_sample] <= t_new + 1e-14 * std::max(1.0, std::abs(t_new))) {
                const Eigen::VectorXd delta = ynew - y;
                const Eigen::VectorXd r3 = h * k1 - delta;
                const Eigen::VectorXd r4 = delta - h * k7 - r3;
                const Eigen::VectorXd r5 =
                    h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next_sample < t_grid.size() &&
                       t_grid[next_sample] <=
                           t_new + 1e-14 * std::max(1.0, std::abs(t_new))) {
                    const double ts = std::min(t_grid[next_sample], t_new);
                    const double th = (ts - t) / h;
                    const double th1 = 1.0 - th;
                    out.states.push_back(y + th * (delta + th1 * (r3 + th * (r4 + th1 * r5))));
                    ++next_sample;
                }
            }
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);
            // PI controller (Gustafsson).
            double fac = 0.9 * std::pow(err > 0 ? err : 1e-16, -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
            err_prev = std::max(err, 1e-16);
        } else {
            double fac = std::isfinite(err) ? 0.9 * std::pow(err, -1.0 / 5.0) : 0.1;
            h *= std::clamp(fac, 0.1, 0.9);
        }
        if (h < h_min) {
            throw StepFailure("integrate_rk45: step size underflow at t = " + std::to_string(t));
        }
    }
    // Anything left (grid points equal to t_end within roundoff).
    while (next_sample < t_grid.size()) {
        out.states.push_back(y);
        ++next_sample;
    }
    return out;
}

}  // namespace spinchain
