#include "spinchain/microsim.hpp"

#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinchain/errors.hpp"
#include "spinchain/ode.hpp"

namespace spinchain {

using Complex = std::complex<double>;
static const Complex kI(0.0, 1.0);

Eigen::Matrix2cd SingleSiteState::density() const {
    Eigen::Matrix2cd rho;
    const double b1 = bloch(0), b2 = bloch(1), b3 = bloch(2);
    rho << 0.5 + b3, Complex(b1, -b2),
        Complex(b1, b2), 0.5 - b3;
    return rho;
}

double SpinChainState::total_trace() const {
    if (rep == Representation::Dense) return rho.trace().real();
    double tr = 0.0;
    for (const auto& b : blocks) tr += b.multiplicity * b.block.trace().real();
    return tr;
}

std::array<Eigen::MatrixXcd, 3> spin_operators(int two_j) {
    const int d = two_j + 1;
    const double j = two_j / 2.0;
    Eigen::MatrixXcd Jp = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd Jz = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = j - a;
        Jz(a, a) = m;
        if (a > 0) Jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    std::array<Eigen::MatrixXcd, 3> J;
    J[0] = (Jp + Jp.adjoint()) / 2.0;
    J[1] = (Jp - Jp.adjoint()) / (2.0 * kI);
    J[2] = Jz;
    return J;
}

namespace {

long double binomial_ld(int n, int k) {
    if (k < 0 || k > n) return 0.0L;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double sector_multiplicity(int N, int two_j) {
    const int k = (N - two_j) / 2;
    return static_cast<double>(binomial_ld(N, k) - binomial_ld(N, k - 1));
}

std::array<Eigen::MatrixXcd, 3> dense_collective_operators(int N) {
    const long dim = 1L << N;
    std::array<Eigen::MatrixXcd, 3> J;
    for (auto& m : J) m = Eigen::MatrixXcd::Zero(dim, dim);
    // bit = 0 means spin up (s3 = +1/2) at that site
    for (long idx = 0; idx < dim; ++idx) {
        for (int k = 0; k < N; ++k) {
            const long mask = 1L << k;
            const bool down = idx & mask;
            J[0](idx ^ mask, idx) += 0.5;
            J[1](idx ^ mask, idx) += down ? Complex(0, -0.5) : Complex(0, 0.5);
            J[2](idx, idx) += down ? -0.5 : 0.5;
        }
    }
    return J;
}

SpinChainState build_product_state(int N, const SingleSiteState& site, Representation rep) {
    SpinChainState state;
    state.N = N;
    state.rep = rep;
    if (rep == Representation::Dense) {
        if (N > 12) throw SizeExceeded("dense representation limited to N <= 12");
        const long dim = 1L << N;
        const Eigen::Matrix2cd rho1 = site.density();
        state.rho = Eigen::MatrixXcd::Zero(dim, dim);
        for (long i = 0; i < dim; ++i) {
            for (long j = 0; j < dim; ++j) {
                Complex v = 1.0;
                for (int k = 0; k < N; ++k) {
                    v *= rho1((i >> k) & 1, (j >> k) & 1);
                }
                state.rho(i, j) = v;
            }
        }
        return state;
    }

    if (N > 128) throw SizeExceeded("sector representation limited to N <= 128");
    const double r = site.bloch.norm();
    const double p = 0.5 + r;  // larger eigenvalue of the site density matrix
    const double q = 0.5 - r;

    for (int two_j = N; two_j >= 0; two_j -= 2) {
        SectorBlock sb;
        sb.two_j = two_j;
        sb.multiplicity = sector_multiplicity(N, two_j);
        const int d = two_j + 1;
        Eigen::VectorXd diag(d);
        for (int a = 0; a < d; ++a) {
            // m = j - a; exponent of p is N/2 + m
            const int up = (N + two_j) / 2 - a;
            diag(a) = std::pow(p, up) * std::pow(q, N - up);
        }
        sb.block = diag.cast<Complex>().asDiagonal();

        // Rotate the z-aligned diagonal state to the lab-frame Bloch axis.
        if (r > 1e-15) {
            const Eigen::Vector3d n = site.bloch / r;
            const double theta = std::acos(std::clamp(n(2), -1.0, 1.0));
            if (theta > 1e-15) {
                Eigen::Vector3d axis(-n(1), n(0), 0.0);
                const double an = axis.norm();
                axis = an > 1e-15 ? Eigen::Vector3d(axis / an) : Eigen::Vector3d::UnitY();
                const auto J = spin_operators(two_j);
                const Eigen::MatrixXcd H = axis(0) * J[0] + axis(1) * J[1] + axis(2) * J[2];
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
                const Eigen::VectorXcd phases =
                    (-kI * theta * es.eigenvalues().cast<Complex>().array()).exp();
                const Eigen::MatrixXcd U =
                    es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
                sb.block = U * sb.block * U.adjoint();
            }
        }
        state.blocks.push_back(std::move(sb));
    }
    return state;
}

namespace {

struct BlockOps {
    std::array<Eigen::MatrixXcd, 3> L;  // J_mu / sqrt(N)
    Eigen::MatrixXcd K;                 // sum_{mu nu} D_{mu nu} L_mu L_nu
};

BlockOps make_block_ops(const std::array<Eigen::MatrixXcd, 3>& J, int N,
                        const Eigen::Matrix3cd& D) {
    BlockOps ops;
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (int mu = 0; mu < 3; ++mu) ops.L[mu] = s * J[mu];
    ops.K = Eigen::MatrixXcd::Zero(J[0].rows(), J[0].cols());
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu)
            if (D(mu, nu) != 0.0) ops.K += D(mu, nu) * (ops.L[mu] * ops.L[nu]);
    return ops;
}

// drho/dt = sum D_{mu nu} L_nu rho L_mu - 1/2 {K, rho}
void block_rhs(const BlockOps& ops, const Eigen::Matrix3cd& D, const Eigen::MatrixXcd& rho,
               Eigen::MatrixXcd& out) {
    std::array<Eigen::MatrixXcd, 3> Q;
    for (int mu = 0; mu < 3; ++mu) Q[mu] = rho * ops.L[mu];
    out = -0.5 * (ops.K * rho + rho * ops.K);
    for (int nu = 0; nu < 3; ++nu) {
        Eigen::MatrixXcd mix = D(0, nu) * Q[0];
        mix += D(1, nu) * Q[1];
        mix += D(2, nu) * Q[2];
        out += ops.L[nu] * mix;
    }
}

std::vector<BlockOps> make_engine(const SpinChainState& state, const KossakowskiSpec& spec) {
    const Eigen::Matrix3cd D = spec.D;
    std::vector<BlockOps> engine;
    if (state.rep == Representation::Dense) {
        engine.push_back(make_block_ops(dense_collective_operators(state.N), state.N, D));
    } else {
        engine.reserve(state.blocks.size());
        for (const auto& b : state.blocks) {
            engine.push_back(make_block_ops(spin_operators(b.two_j), state.N, D));
        }
    }
    return engine;
}

std::size_t flat_size(const SpinChainState& state) {
    if (state.rep == Representation::Dense) {
        return 2 * static_cast<std::size_t>(state.rho.size());
    }
    std::size_t n = 0;
    for (const auto& b : state.blocks) n += 2 * static_cast<std::size_t>(b.block.size());
    return n;
}

void flatten(const SpinChainState& state, Eigen::VectorXd& y) {
    y.resize(static_cast<Eigen::Index>(flat_size(state)));
    double* dst = y.data();
    auto copy = [&dst](const Eigen::MatrixXcd& m) {
        std::memcpy(dst, m.data(), sizeof(Complex) * m.size());
        dst += 2 * m.size();
    };
    if (state.rep == Representation::Dense) {
        copy(state.rho);
    } else {
        for (const auto& b : state.blocks) copy(b.block);
    }
}

void unflatten(const Eigen::VectorXd& y, SpinChainState& state) {
    const double* src = y.data();
    auto copy = [&src](Eigen::MatrixXcd& m) {
        std::memcpy(m.data(), src, sizeof(Complex) * m.size());
        src += 2 * m.size();
    };
    if (state.rep == Representation::Dense) {
        copy(state.rho);
    } else {
        for (auto& b : state.blocks) copy(b.block);
    }
}

void validate_sample(const SpinChainState& state, double t, double pos_tol) {
    const double tr_err = std::abs(state.total_trace() - 1.0);
    if (tr_err > 1e-9) {
        throw StepFailure("trace drift " + std::to_string(tr_err) + " at t = " +
                          std::to_string(t));
    }
    auto check = [&](const Eigen::MatrixXcd& m, double weight) {
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-9) {
            throw StepFailure("Hermiticity drift " + std::to_string(herm) + " at t = " +
                              std::to_string(t));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        const double mineig = weight * es.eigenvalues().minCoeff();
        if (mineig < -pos_tol) {
            throw NotPositive("negative eigenvalue " + std::to_string(mineig) + " at t = " +
                              std::to_string(t));
        }
    };
    if (state.rep == Representation::Dense) {
        check(state.rho, 1.0);
    } else {
        for (const auto& b : state.blocks) check(b.block, 1.0);
    }
}

}  // namespace

SpinChainState lindblad_rhs(const SpinChainState& state, const KossakowskiSpec& spec) {
    const auto engine = make_engine(state, spec);
    const Eigen::Matrix3cd D = spec.D;
    SpinChainState deriv = state;
    if (state.rep == Representation::Dense) {
        block_rhs(engine[0], D, state.rho, deriv.rho);
    } else {
        for (std::size_t i = 0; i < state.blocks.size(); ++i) {
            block_rhs(engine[i], D, state.blocks[i].block, deriv.blocks[i].block);
        }
    }
    return deriv;
}

SpinChainState lindblad_rhs_reference(const SpinChainState& state, const KossakowskiSpec& spec) {
    const Eigen::Matrix3cd D = spec.D;
    SpinChainState deriv = state;
    auto naive = [&](const std::array<Eigen::MatrixXcd, 3>& J, const Eigen::MatrixXcd& rho,
                     Eigen::MatrixXcd& out) {
        const double s = 1.0 / std::sqrt(static_cast<double>(state.N));
        out.setZero(rho.rows(), rho.cols());
        for (int mu = 0; mu < 3; ++mu) {
            for (int nu = 0; nu < 3; ++nu) {
                const Eigen::MatrixXcd Lm = s * J[mu];
                const Eigen::MatrixXcd Ln = s * J[nu];
                out += D(mu, nu) *
                       (Ln * rho * Lm - 0.5 * (Lm * Ln * rho + rho * Lm * Ln));
            }
        }
    };
    if (state.rep == Representation::Dense) {
        naive(dense_collective_operators(state.N), state.rho, deriv.rho);
    } else {
        for (std::size_t i = 0; i < state.blocks.size(); ++i) {
            naive(spin_operators(state.blocks[i].two_j), state.blocks[i].block,
                  deriv.blocks[i].block);
        }
    }
    return deriv;
}

std::vector<std::pair<double, SpinChainState>> evolve_micro(const SpinChainState& state0,
                                                            const KossakowskiSpec& spec,
                                                            const std::vector<double>& t_grid,
                                                            const EvolveOptions& opts) {
    const auto engine = make_engine(state0, spec);
    const Eigen::Matrix3cd D = spec.D;
    const int n_blocks =
        state0.rep == Representation::Dense ? 1 : static_cast<int>(state0.blocks.size());

    // Thread-local scratch states; RK45 itself is serial, blocks run in parallel.
    SpinChainState scratch_in = state0;
    SpinChainState scratch_out = state0;

    OdeRhs rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        unflatten(y, scratch_in);
        if (state0.rep == Representation::Dense) {
            block_rhs(engine[0], D, scratch_in.rho, scratch_out.rho);
        } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel && n_blocks > 1)
#endif
            for (int i = 0; i < n_blocks; ++i) {
                block_rhs(engine[i], D, scratch_in.blocks[i].block,
                          scratch_out.blocks[i].block);
            }
        }
        flatten(scratch_out, dy);
    };

    Eigen::VectorXd y0;
    flatten(state0, y0);
    OdeSolution sol = integrate_rk45(rhs, y0, t_grid, opts.tol);

    std::vector<std::pair<double, SpinChainState>> out;
    out.reserve(sol.states.size());
    const double t0 = t_grid.front();
    for (std::size_t i = 0; i < sol.states.size(); ++i) {
        SpinChainState s = state0;
        unflatten(sol.states[i], s);
        // Global integration error grows with elapsed time, so the tolerated
        // eigenvalue undershoot does too.
        const double pos_tol =
            std::max(1e-7, 10.0 * opts.tol * (1.0 + (sol.times[i] - t0)));
        if (opts.validate) validate_sample(s, sol.times[i], pos_tol);
        out.emplace_back(sol.times[i], std::move(s));
    }
    return out;
}

namespace {

struct Moments {
    Eigen::Vector3d first = Eigen::Vector3d::Zero();      // <J_mu>
    Eigen::Matrix3d second_sym = Eigen::Matrix3d::Zero();  // 1/2 <{J_mu, J_nu}>
};

Moments collective_moments(const SpinChainState& state) {
    Moments m;
    Eigen::Matrix3d raw = Eigen::Matrix3d::Zero();  // Re <J_mu J_nu>
    auto accumulate = [&](const std::array<Eigen::MatrixXcd, 3>& J, const Eigen::MatrixXcd& rho,
                          double weight) {
        std::array<Eigen::MatrixXcd, 3> Q;
        for (int mu = 0; mu < 3; ++mu) {
            Q[mu] = rho * J[mu];
            m.first(mu) += weight * Q[mu].trace().real();
        }
        for (int mu = 0; mu < 3; ++mu) {
            for (int nu = 0; nu < 3; ++nu) {
                // tr(rho J_mu J_nu) = tr((rho J_mu) J_nu)
                raw(mu, nu) +=
                    weight * (Q[mu].cwiseProduct(J[nu].transpose())).sum().real();
            }
        }
    };
    if (state.rep == Representation::Dense) {
        accumulate(dense_collective_operators(state.N), state.rho, 1.0);
    } else {
        for (const auto& b : state.blocks) {
            accumulate(spin_operators(b.two_j), b.block, b.multiplicity);
        }
    }
    m.second_sym = (raw + raw.transpose()) / 2.0;
    return m;
}

}  // namespace

MicroObservables collective_observables(const SpinChainState& state, Reference ref,
                                        const Eigen::Vector3d* fixed_mean) {
    const Moments mom = collective_moments(state);
    const double N = state.N;
    MicroObservables obs;
    obs.mean = mom.first / N;
    Eigen::Vector3d mref = obs.mean;
    if (ref == Reference::InitialFixed) {
        if (fixed_mean == nullptr) {
            throw ConfigError("InitialFixed reference requires the t = 0 means");
        }
        mref = *fixed_mean;
    }
    for (int mu = 0; mu < 3; ++mu) {
        for (int nu = 0; nu < 3; ++nu) {
            obs.fluct_cov(mu, nu) =
                (mom.second_sym(mu, nu) - N * mref(nu) * mom.first(mu) -
                 N * mref(mu) * mom.first(nu) + N * N * mref(mu) * mref(nu)) /
                N;
        }
    }
    if (state.N >= 2) obs.pair_corr_12 = pair_correlation_12(state);
    return obs;
}

double pair_correlation_12(const SpinChainState& state) {
    if (state.N < 2) throw ConfigError("pair_correlation_12 requires N >= 2");
    if (state.rep == Representation::Dense) {
        // exchange-symmetry check: swap sites 0 and 1
        const long dim = state.rho.rows();
        double err = 0.0;
        auto swap01 = [](long idx) {
            const long b0 = idx & 1, b1 = (idx >> 1) & 1;
            return (idx & ~3L) | (b0 << 1) | b1;
        };
        for (long i = 0; i < dim; ++i)
            for (long j = 0; j < dim; ++j)
                err = std::max(err, std::abs(state.rho(i, j) - state.rho(swap01(i), swap01(j))));
        if (err > 1e-8) {
            throw NotExchangeSymmetric("dense state fails the site-swap check by " +
                                       std::to_string(err));
        }
    }
    const Moments mom = collective_moments(state);
    const double N = state.N;
    return mom.second_sym(0, 1) / (N * (N - 1)) - mom.first(0) * mom.first(1) / (N * N);
}

std::complex<double> qclt_product_char(const SingleSiteState& site, long long N,
                                       const Eigen::Vector3d& r) {
    const double rn = r.norm();
    if (rn < 1e-300) return 1.0;
    const double sqrtN = std::sqrt(static_cast<double>(N));
    const double theta = rn / (2.0 * sqrtN);
    const Eigen::Vector3d rhat = r / rn;
    // tr(rho e^{i r.s/sqrt(N)}) = cos(theta) + i sin(theta) * 2 (rhat . bloch)
    const Complex z(std::cos(theta), std::sin(theta) * 2.0 * rhat.dot(site.bloch));
    const Complex logz = std::log(z);
    return std::exp(static_cast<double>(N) * logz - kI * sqrtN * r.dot(site.bloch));
}

std::complex<double> fluctuation_char(const SpinChainState& state, const Eigen::Vector3d& r,
                                      Reference ref, const Eigen::Vector3d* fixed_mean) {
    const double sqrtN = std::sqrt(static_cast<double>(state.N));
    Complex cf = 0.0;
    auto accumulate = [&](const std::array<Eigen::MatrixXcd, 3>& J, const Eigen::MatrixXcd& rho,
                          double weight) {
        const Eigen::MatrixXcd H = r(0) * J[0] + r(1) * J[1] + r(2) * J[2];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        const Eigen::VectorXcd phases =
            (kI / sqrtN * es.eigenvalues().cast<Complex>().array()).exp();
        const Eigen::MatrixXcd rot = es.eigenvectors().adjoint() * rho * es.eigenvectors();
        cf += weight * (rot.diagonal().array() * phases.array()).sum();
    };
    if (state.rep == Representation::Dense) {
        if (state.N > 10) throw SizeExceeded("dense fluctuation_char limited to N <= 10");
        accumulate(dense_collective_operators(state.N), state.rho, 1.0);
    } else {
        for (const auto& b : state.blocks) {
            if (b.two_j + 1 > 129) throw SizeExceeded("sector dimension exceeds 129");
            accumulate(spin_operators(b.two_j), b.block, b.multiplicity);
        }
    }
    Eigen::Vector3d mref;
    if (ref == Reference::InitialFixed) {
        if (fixed_mean == nullptr) {
            throw ConfigError("InitialFixed reference requires the t = 0 means");
        }
        mref = *fixed_mean;
    } else {
        mref = collective_observables(state).mean;
    }
    return cf * std::exp(-kI * sqrtN * r.dot(mref));
}

}  // namespace spinchain
