#ifndef SPINCHAIN_ODE_HPP
#define SPINCHAIN_ODE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace spinchain {

// Right-hand side f(t, y, dydt). dydt is preallocated to y's size.
using OdeRhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct OdeSolution {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
};

// Embedded Dormand-Prince 5(4) with PI step-size control and cubic Hermite
// dense output at the requested grid times. atol = rtol = tol.
// Throws StepFailure if the step size underflows.
OdeSolution integrate_rk45(const OdeRhs& rhs, const Eigen::VectorXd& y0,
                           const std::vector<double>& t_grid, double tol);

}  // namespace spinchain

#endif
