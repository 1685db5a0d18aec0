#ifndef SPINCHAIN_MICROSIM_HPP
#define SPINCHAIN_MICROSIM_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "spinchain/algebra.hpp"

namespace spinchain {

enum class Representation { Dense, Sectors };
enum class Reference { Evolved, InitialFixed };

struct SingleSiteState {
    Eigen::Vector3d bloch = Eigen::Vector3d::Zero();
    Eigen::Matrix2cd density() const;  // rho = I/2 + bloch . sigma
};

// One collective-spin (Dicke) sector: spin j = two_j/2 with its
// permutation multiplicity m_{N,j}.
struct SectorBlock {
    int two_j = 0;
    double multiplicity = 1.0;
    Eigen::MatrixXcd block;  // (two_j+1) x (two_j+1)
};

struct SpinChainState {
    int N = 0;
    Representation rep = Representation::Sectors;
    Eigen::MatrixXcd rho;             // Dense only
    std::vector<SectorBlock> blocks;  // Sectors only

    double total_trace() const;
};

struct MicroObservables {
    double t = 0.0;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();    // <J_mu>/N
    Eigen::Matrix3d fluct_cov = Eigen::Matrix3d::Zero();
    double pair_corr_12 = 0.0;  // cross-site C_12, 0 for N < 2
};

// Spin-j irrep matrices (Jx, Jy, Jz) for two_j = 2j, basis m = j..-j.
std::array<Eigen::MatrixXcd, 3> spin_operators(int two_j);

// m_{N,j} = C(N, N/2-j) - C(N, N/2-j-1).
double sector_multiplicity(int N, int two_j);

// Collective site-sum operators J_mu on the 2^N dense space.
std::array<Eigen::MatrixXcd, 3> dense_collective_operators(int N);

// N-fold product of a single-site state. Dense requires N <= 12,
// Sectors N <= 128.
SpinChainState build_product_state(int N, const SingleSiteState& site, Representation rep);

// Schroedinger-picture generator: drho/dt = sum D_{mu nu} (L_nu rho L_mu
// - 1/2 {L_mu L_nu, rho}) with L_mu = J_mu / sqrt(N). Trace-free.
SpinChainState lindblad_rhs(const SpinChainState& state, const KossakowskiSpec& spec);

// Serial reference: the same generator evaluated term by term over the
// nine (mu, nu) pairs without precombination or threading. Kept as an
// independent cross-check of the optimized kernel.
SpinChainState lindblad_rhs_reference(const SpinChainState& state, const KossakowskiSpec& spec);

struct EvolveOptions {
    double tol = 1e-8;
    bool validate = true;  // trace/Hermiticity/positivity checks at samples
    bool parallel = true;  // OpenMP over sector blocks
};

std::vector<std::pair<double, SpinChainState>> evolve_micro(const SpinChainState& state0,
                                                            const KossakowskiSpec& spec,
                                                            const std::vector<double>& t_grid,
                                                            const EvolveOptions& opts);

// fixed_mean is required (per-site means at t = 0) for InitialFixed.
MicroObservables collective_observables(const SpinChainState& state,
                                        Reference ref = Reference::Evolved,
                                        const Eigen::Vector3d* fixed_mean = nullptr);

// Cross-site correlation <s1^(i) s2^(j)> - <s1^(i)><s2^(j)>, i != j, via the
// collective anticommutator identity. Dense states are site-swap checked.
double pair_correlation_12(const SpinChainState& state);

// Closed product form [tr(rho e^{i r.s/sqrt(N)})]^N e^{-i sqrt(N) r.bloch}.
std::complex<double> qclt_product_char(const SingleSiteState& site, long long N,
                                       const Eigen::Vector3d& r);

// <e^{i r.J/sqrt(N)}> e^{-i sqrt(N) r.mean_ref} by per-sector eigendecomposition.
std::complex<double> fluctuation_char(const SpinChainState& state, const Eigen::Vector3d& r,
                                      Reference ref = Reference::Evolved,
                                      const Eigen::Vector3d* fixed_mean = nullptr);

}  // namespace spinchain

#endif
