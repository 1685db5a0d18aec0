#include "spinchain/mesoflow.hpp"

#include <cmath>

#include "spinchain/errors.hpp"
#include "spinchain/ode.hpp"

namespace spinchain {

Eigen::Matrix3d symplectic_form(const Eigen::Vector3d& w) {
    Eigen::Matrix3d s;
    s << 0, w(2), -w(1),
        -w(2), 0, w(0),
        w(1), -w(0), 0;
    return s;
}

FlowMatrices build_flow_matrices(const Eigen::Vector3d& omega, const Eigen::Matrix3d& A,
                                 const Eigen::Matrix3d& B) {
    FlowMatrices m;
    m.sigma = symplectic_form(omega);
    const Eigen::Vector3d Bw = B * omega;
    // C_{mu nu} = eps_{mu mu' nu} (B omega)_{mu'}
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    static const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                                     {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                                     {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu)
            for (int mup = 0; mup < 3; ++mup) C(mu, nu) += eps[mu][mup][nu] * Bw(mup);
    m.C = C;
    m.F = m.sigma * B + C;  // (sigma B)^T = B sigma, so F Sigma + Sigma F^T regroups the flow
    m.G = m.sigma * A * m.sigma.transpose();
    return m;
}

namespace {

Eigen::Matrix3d unpack_sym(const Eigen::VectorXd& y, int off) {
    Eigen::Matrix3d S;
    S << y(off + 0), y(off + 1), y(off + 2),
        y(off + 1), y(off + 3), y(off + 4),
        y(off + 2), y(off + 4), y(off + 5);
    return S;
}

void pack_sym(const Eigen::Matrix3d& S, Eigen::VectorXd& y, int off) {
    y(off + 0) = S(0, 0);
    y(off + 1) = S(0, 1);
    y(off + 2) = S(0, 2);
    y(off + 3) = S(1, 1);
    y(off + 4) = S(1, 2);
    y(off + 5) = S(2, 2);
}

}  // namespace

std::vector<CovarianceState> integrate_covariance(const Eigen::Matrix3d& Sigma0,
                                                  const MacroTrajectory& macro,
                                                  const Eigen::Matrix3d& A,
                                                  const Eigen::Matrix3d& B, double tol) {
    if (macro.states.empty()) return {};
    Eigen::VectorXd y0(9);
    y0.head<3>() = macro.states.front();
    pack_sym((Sigma0 + Sigma0.transpose()) / 2.0, y0, 3);

    OdeRhs rhs = [&A, &B](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Eigen::Vector3d w = y.head<3>();
        const Eigen::Matrix3d S = unpack_sym(y, 3);
        const FlowMatrices m = build_flow_matrices(w, A, B);
        dy.resize(9);
        dy.head<3>() = macro_rhs(w, B);
        const Eigen::Matrix3d FS = m.F * S;
        const Eigen::Matrix3d dS = FS + FS.transpose() + m.G;
        pack_sym(dS, dy, 3);
    };
    OdeSolution sol = integrate_rk45(rhs, y0, macro.times, tol);

    std::vector<CovarianceState> out;
    out.reserve(sol.states.size());
    for (std::size_t i = 0; i < sol.states.size(); ++i) {
        CovarianceState cs;
        cs.t = sol.times[i];
        cs.frame = Frame::Full3;
        cs.Sigma = unpack_sym(sol.states[i], 3);
        out.push_back(std::move(cs));
    }
    return out;
}

Eigen::Matrix2d reduced_kossakowski(const Eigen::Matrix3d& A, double xi) {
    Eigen::Matrix2d A2;
    const double xa = std::abs(xi);
    A2 << A(0, 0) * xa, A(0, 1) * xi,
        A(0, 1) * xi, A(1, 1) * xa;
    return A2;
}

Eigen::Matrix2d to_qp_frame(const Eigen::Matrix2d& block, double xi) {
    const double xa = std::abs(xi);
    const double sg = xi >= 0 ? 1.0 : -1.0;
    Eigen::Matrix2d out;
    out << block(0, 0) / xa, sg * block(0, 1) / xa,
        sg * block(1, 0) / xa, block(1, 1) / xa;
    return out;
}

Eigen::Matrix2d from_qp_frame(const Eigen::Matrix2d& qp, double xi) {
    const double xa = std::abs(xi);
    const double sg = xi >= 0 ? 1.0 : -1.0;
    Eigen::Matrix2d out;
    out << qp(0, 0) * xa, sg * qp(0, 1) * xa,
        sg * qp(1, 0) * xa, qp(1, 1) * xa;
    return out;
}

namespace {

const Eigen::Matrix2d kSymp2 = (Eigen::Matrix2d() << 0, 1, -1, 0).finished();

// (1 - e^{-2bt})/(2b), continuously extended to t at b = 0.
double noise_weight(double b, double t) {
    if (std::abs(b) < 1e-300) return t;
    const double x = 2.0 * b * t;
    if (std::abs(x) < 1e-5) return t * (1.0 - x / 2.0 + x * x / 6.0);
    return (1.0 - std::exp(-x)) / (2.0 * b);
}

}  // namespace

Eigen::Matrix2d two_mode_closed_form(const Eigen::Matrix2d& Sigma0, const Eigen::Matrix2d& A2,
                                     double b, double t) {
    return std::exp(-2.0 * b * t) * Sigma0 - noise_weight(b, t) * (kSymp2 * A2 * kSymp2);
}

Eigen::Matrix2d asymptotic_covariance(const Eigen::Matrix2d& A2, double b) {
    if (b <= 0) {
        throw NoStationaryState("no invariant mesoscopic Gaussian state for b <= 0");
    }
    Eigen::Matrix2d S;
    S << A2(1, 1), -A2(0, 1),
        -A2(0, 1), A2(0, 0);
    return S / (2.0 * b);
}

WeylChannel weyl_channel(const Eigen::Vector2d& r, const Eigen::Matrix2d& A2, double b,
                         double t) {
    WeylChannel ch;
    ch.r_t = std::exp(-b * t) * r;
    ch.Y = noise_weight(b, t) * (kSymp2 * A2 * kSymp2.transpose());
    return ch;
}

ChannelPropagator propagate_channel(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& A,
                                    const Eigen::Matrix3d& B, double t_start, double t_end,
                                    double tol) {
    Eigen::Vector3d w_start = omega0;
    if (t_start > 0) {
        MacroTrajectory pre = integrate_macro(omega0, B, {0.0, t_start}, tol);
        w_start = pre.states.back();
    }
    ChannelPropagator prop;
    prop.t0 = t_start;
    prop.t = t_end;
    if (t_end <= t_start) return prop;

    // State: omega (3) + X row-major (9) + Y packed (6).
    Eigen::VectorXd y0(18);
    y0.head<3>() = w_start;
    Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(y0.data() + 3) =
        Eigen::Matrix3d::Identity();
    y0.tail<6>().setZero();

    OdeRhs rhs = [&A, &B](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Eigen::Vector3d w = y.head<3>();
        const Eigen::Matrix3d X =
            Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(y.data() + 3);
        const Eigen::Matrix3d Y = unpack_sym(y, 12);
        const FlowMatrices m = build_flow_matrices(w, A, B);
        dy.resize(18);
        dy.head<3>() = macro_rhs(w, B);
        Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(dy.data() + 3) = m.F * X;
        const Eigen::Matrix3d FY = m.F * Y;
        pack_sym(FY + FY.transpose() + m.G, dy, 12);
    };
    OdeSolution sol = integrate_rk45(rhs, y0, {t_start, t_end}, tol);
    const Eigen::VectorXd& yf = sol.states.back();
    prop.X = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(yf.data() + 3);
    prop.Y = unpack_sym(yf, 12);
    return prop;
}

double composition_gap(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& A,
                       const Eigen::Matrix3d& B, double t0, double s, double t, double tol) {
    if (!(t0 <= s && s <= t)) throw ConfigError("composition_gap requires t0 <= s <= t");

    auto elapsed_map = [&](double tau) {
        return propagate_channel(omega0, A, B, 0.0, tau, tol);
    };
    const ChannelPropagator direct = elapsed_map(t - t0);
    const ChannelPropagator first = elapsed_map(s - t0);
    const ChannelPropagator second = elapsed_map(t - s);

    const std::vector<Eigen::Matrix3d> probes = {
        Eigen::Matrix3d::Identity() / 4.0,
        Eigen::Matrix3d::Identity() / 4.0 - omega0 * omega0.transpose(),
        Eigen::Vector3d(0.3, 0.2, 0.25).asDiagonal().toDenseMatrix()};

    double gap = 0.0;
    for (const auto& S : probes) {
        const Eigen::Matrix3d direct_S = direct.X * S * direct.X.transpose() + direct.Y;
        const Eigen::Matrix3d mid = first.X * S * first.X.transpose() + first.Y;
        const Eigen::Matrix3d comp_S = second.X * mid * second.X.transpose() + second.Y;
        gap = std::max(gap, (direct_S - comp_S).norm());
    }
    return gap;
}

double third_mode_variance(const Eigen::Vector3d& omega0, const Eigen::Matrix3d& Sigma0) {
    const double xi = omega0.norm();
    if (xi < 1e-14) throw DegenerateLength("third_mode_variance requires |omega0| > 0");
    return omega0.dot(Sigma0 * omega0) / (xi * xi);
}

double gaussian_char(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& r) {
    return std::exp(-0.5 * r.dot(Sigma * r));
}

double admissibility_margin(const Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& sigma_form) {
    Eigen::MatrixXcd M = Sigma.cast<std::complex<double>>() +
                         std::complex<double>(0, 0.5) * sigma_form.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace spinchain
