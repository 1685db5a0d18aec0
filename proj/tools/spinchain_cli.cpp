#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinchain/acceptance.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/scenario.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

spinchain::Scenario load(const Options& opt) {
    spinchain::Scenario sc = spinchain::load_scenario(opt.config);
    if (!opt.out.empty()) sc.output_dir = opt.out;
    if (opt.seed_set) sc.seed = opt.seed;
    return sc;
}

int run_parts(const Options& opt, unsigned parts) {
    spinchain::Scenario sc;
    try {
        sc = load(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        const auto manifest = spinchain::run_scenario(sc, parts);
        std::printf("%s\n", manifest.dump(2).c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

int run_sweep(const Options& opt, const std::string& target_name) {
    spinchain::Scenario sc;
    spinchain::SweepTarget target;
    try {
        sc = load(opt);
        target = spinchain::sweep_target_from_string(target_name);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        const auto report = spinchain::convergence_sweep(sc, target);
        std::printf("%s\n", report.dump(2).c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-scale laboratory for a dissipative mean-field spin chain"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config, "Scenario JSON path");
    app.add_option("--out", opt.out, "Output directory (overrides scenario)");
    app.add_option("--threads", opt.threads, "OpenMP thread count (0 = default)");
    auto* seed_opt = app.add_option("--seed", opt.seed, "Seed override");

    auto* macro = app.add_subcommand("macro", "Mean-magnetization trajectory");
    auto* meso = app.add_subcommand("meso", "Fluctuation covariance flow");
    auto* micro = app.add_subcommand("micro", "Exact finite-N evolution per N");
    auto* fock = app.add_subcommand("fock", "Fock-space stationary analysis");
    auto* sweep = app.add_subcommand("sweep", "Convergence sweep over n_values");
    auto* verify = app.add_subcommand("verify", "Run the full acceptance suite");
    std::string target = "MacroMeans";
    sweep->add_option("--target", target, "MacroMeans | FluctCov | PairCorr");

    for (auto* cmd : {macro, meso, micro, fock, sweep}) {
        cmd->callback([] {});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are config errors
    }
    opt.seed_set = seed_opt->count() > 0;
#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif

    if (verify->parsed()) {
        const auto results = spinchain::run_acceptance();
        return spinchain::report_acceptance(results) == 0 ? 0 : 1;
    }
    if (opt.config.empty()) {
        std::fprintf(stderr, "config error: --config is required\n");
        return 2;
    }
    if (macro->parsed()) return run_parts(opt, spinchain::kRunMacro);
    if (meso->parsed()) return run_parts(opt, spinchain::kRunMacro | spinchain::kRunMeso);
    if (micro->parsed()) return run_parts(opt, spinchain::kRunMicro);
    if (fock->parsed()) return run_parts(opt, spinchain::kRunFock);
    if (sweep->parsed()) return run_sweep(opt, target);
    return 2;
}
