// Timing comparison of the combined-kernel Lindblad RHS (optionally
// OpenMP-parallel over Dicke sectors) against the term-by-term serial
// reference, plus a short adaptive evolution at each size.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinchain/algebra.hpp"
#include "spinchain/microsim.hpp"

using namespace spinchain;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d B = dual_to_antisymmetric(Eigen::Vector3d(0.0, 0.0, 1.0));
    const std::complex<double> i1(0.0, 1.0);
    const KossakowskiSpec spec = validate_kossakowski(
        A.cast<std::complex<double>>() + i1 * B.cast<std::complex<double>>());
    const SingleSiteState site{Eigen::Vector3d(0.3, 0.0, 0.4)};

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: disabled at build time\n");
#endif
    std::printf("%6s %14s %14s %10s %12s\n", "N", "kernel (ms)", "reference (ms)",
                "speedup", "max |diff|");

    for (int N : {16, 32, 48, 64}) {
        const auto state = build_product_state(N, site, Representation::Sectors);
        const int reps = N <= 32 ? 50 : 10;

        auto t0 = std::chrono::steady_clock::now();
        SpinChainState out;
        for (int r = 0; r < reps; ++r) out = lindblad_rhs(state, spec);
        const double kernel_ms = seconds_since(t0) / reps * 1e3;

        t0 = std::chrono::steady_clock::now();
        SpinChainState ref;
        for (int r = 0; r < reps; ++r) ref = lindblad_rhs_reference(state, spec);
        const double ref_ms = seconds_since(t0) / reps * 1e3;

        double diff = 0.0;
        for (std::size_t k = 0; k < out.blocks.size(); ++k) {
            diff = std::max(diff,
                            (out.blocks[k].block - ref.blocks[k].block).cwiseAbs().maxCoeff());
        }
        std::printf("%6d %14.3f %14.3f %9.2fx %12.3e\n", N, kernel_ms, ref_ms,
                    ref_ms / kernel_ms, diff);
    }

    std::printf("\nadaptive evolution to t = 1 (tol 1e-8):\n");
    for (int N : {16, 32, 64}) {
        const auto state = build_product_state(N, site, Representation::Sectors);
        EvolveOptions opts;
        opts.tol = 1e-8;
        const std::vector<double> grid{0.0, 1.0};
        const auto t0 = std::chrono::steady_clock::now();
        evolve_micro(state, spec, grid, opts);
        std::printf("  N = %3d: %.3f s\n", N, seconds_since(t0));
    }
    return 0;
}
