#include "spinchain/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "spinchain/errors.hpp"
#include "spinchain/io.hpp"
#include "spinchain/macroflow.hpp"
#include "spinchain/mesoflow.hpp"
#include "spinchain/microsim.hpp"
#include "spinchain/fockstat.hpp"

namespace spinchain {

namespace {

Eigen::MatrixXcd parse_complex_matrix(const nlohmann::json& block) {
    if (!block.contains("re")) throw ConfigError("kossakowski block needs \"re\"");
    const auto& re = block["re"];
    const int n = static_cast<int>(re.size());
    Eigen::MatrixXcd D(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(re[i].size()) != n) throw ConfigError("\"re\" must be square");
        for (int j = 0; j < n; ++j) D(i, j) = re[i][j].get<double>();
    }
    if (block.contains("im")) {
        const auto& im = block["im"];
        if (static_cast<int>(im.size()) != n) throw ConfigError("\"im\" shape mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                D(i, j) += std::complex<double>(0.0, im[i][j].get<double>());
    }
    return D;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Scenario parse_scenario(const nlohmann::json& cfg) {
    Scenario sc;
    sc.echo = cfg;
    if (!cfg.contains("kossakowski")) throw ConfigError("missing \"kossakowski\" block");
    const auto& kb = cfg["kossakowski"];
    const Eigen::MatrixXcd D = parse_complex_matrix(kb);
    if (kb.contains("dim") && kb["dim"].get<int>() != D.rows()) {
        throw ConfigError("kossakowski dim does not match matrix shape");
    }
    sc.kossakowski = validate_kossakowski(D);

    if (cfg.contains("initial_bloch")) {
        const auto& v = cfg["initial_bloch"];
        if (v.size() != 3) throw ConfigError("initial_bloch must have 3 entries");
        for (int i = 0; i < 3; ++i) sc.initial_bloch(i) = v[i].get<double>();
    }
    if (sc.initial_bloch.norm() > 0.5 + 1e-12) {
        throw ConfigError("initial_bloch must satisfy |omega| <= 1/2");
    }
    if (cfg.contains("initial_covariance")) {
        const auto& m = cfg["initial_covariance"];
        if (m.size() != 3) throw ConfigError("initial_covariance must be 3x3");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) sc.initial_covariance(i, j) = m[i][j].get<double>();
        if ((sc.initial_covariance - sc.initial_covariance.transpose()).norm() > 1e-10) {
            throw ConfigError("initial_covariance must be symmetric");
        }
    } else {
        sc.initial_covariance = Eigen::Matrix3d::Identity() / 4.0 -
                                sc.initial_bloch * sc.initial_bloch.transpose();
    }
    if (cfg.contains("n_values")) {
        for (const auto& n : cfg["n_values"]) {
            const int N = n.get<int>();
            if (N < 1 || N > 128) throw ConfigError("n_values entries must be in [1, 128]");
            sc.n_values.push_back(N);
        }
    }
    sc.t_max = cfg.value("t_max", 5.0);
    sc.tol = cfg.value("tol", 1e-8);
    if (sc.t_max <= 0 || sc.tol <= 0) throw ConfigError("t_max and tol must be positive");
    if (cfg.contains("fock")) {
        FockConfig fc;
        fc.b = cfg["fock"].value("b", 1.0);
        fc.n_max = cfg["fock"].value("n_max", 30);
        if (fc.n_max < 4) throw ConfigError("fock.n_max must be >= 4");
        sc.fock = fc;
    }
    sc.seed = cfg.value("seed", 0ull);
    sc.output_dir = cfg.value("output_dir", std::string("."));
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    nlohmann::json cfg;
    try {
        f >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_scenario(cfg);
}

nlohmann::json run_scenario(const Scenario& sc, unsigned parts) {
    namespace fs = std::filesystem;
    if (sc.kossakowski.dim != 3 && (parts & (kRunMacro | kRunMeso | kRunMicro))) {
        throw ConfigError("macro/meso/micro pipelines require a 3x3 Kossakowski matrix");
    }
    fs::create_directories(sc.output_dir);
    const Eigen::Matrix3d B =
        sc.kossakowski.dim == 3 ? Eigen::Matrix3d(sc.kossakowski.B) : Eigen::Matrix3d::Zero();
    const Eigen::Matrix3d A =
        sc.kossakowski.dim == 3 ? Eigen::Matrix3d(sc.kossakowski.A) : Eigen::Matrix3d::Zero();

    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    const auto grid = linspace(0.0, sc.t_max, 401);

    MacroTrajectory macro;
    if (parts & (kRunMacro | kRunMeso)) {
        macro = integrate_macro(sc.initial_bloch, B, grid, sc.tol);
    }
    if (parts & kRunMacro) {
        files.emplace_back("macro.csv", macro_trajectory_csv(macro));
    }
    if (parts & kRunMeso) {
        const auto cov = integrate_covariance(sc.initial_covariance, macro, A, B, sc.tol);
        files.emplace_back("meso.csv", covariance_csv(cov));

        const CanonicalFrame frame = canonical_frame(sc.kossakowski, sc.initial_bloch);
        const FixedPointInfo fp = classify_fixed_points(frame.lambda, sc.initial_bloch.norm());
        const double xi_stable = fp.stable_point(2);
        const Eigen::Matrix2d A2 = reduced_kossakowski(frame.A_rot, xi_stable);
        const WeylChannel ch = weyl_channel(Eigen::Vector2d(1.0, 1.0), A2, fp.b, sc.t_max);
        nlohmann::json cj;
        cj["t"] = sc.t_max;
        cj["r_t"] = {ch.r_t(0), ch.r_t(1)};
        cj["Y"] = matrix_json(ch.Y);
        files.emplace_back("channel.json", cj.dump(2) + "\n");
    }
    if (parts & kRunMicro) {
        const auto micro_grid = linspace(0.0, sc.t_max, 51);
        for (int N : sc.n_values) {
            SingleSiteState site{sc.initial_bloch};
            const auto state0 = build_product_state(N, site, Representation::Sectors);
            EvolveOptions opts;
            opts.tol = sc.tol;
            const auto traj = evolve_micro(state0, sc.kossakowski, micro_grid, opts);
            std::vector<MicroObservables> rows;
            rows.reserve(traj.size());
            for (const auto& [t, st] : traj) {
                MicroObservables obs = collective_observables(st);
                obs.t = t;
                rows.push_back(obs);
            }
            files.emplace_back("micro_N" + std::to_string(N) + ".csv",
                               micro_observables_csv(rows));
        }
    }
    if ((parts & kRunFock) && sc.fock) {
        const FockLiouvillian L = build_liouvillian(sc.fock->b, sc.fock->n_max);
        const auto states = stationary_states(L, 1e-10);
        int flagged = 0;
        double best_fid = 0.0;
        int physical_unflagged = 0;
        for (const auto& s : states) {
            if (s.truncation_artifact) ++flagged;
            if (s.physical && !s.truncation_artifact) {
                ++physical_unflagged;
                best_fid = std::max(best_fid, s.vacuum_fidelity);
            }
        }
        nlohmann::json fj;
        fj["b"] = sc.fock->b;
        fj["n_max"] = sc.fock->n_max;
        fj["stationary_count"] = physical_unflagged;
        fj["flagged_count"] = flagged;
        fj["vacuum_fidelity"] = best_fid;
        files.emplace_back("fock_report.json", fj.dump(2) + "\n");
    }

    nlohmann::json manifest;
    manifest["config"] = sc.echo;
    manifest["files"] = nlohmann::json::array();
    for (const auto& [name, content] : files) {
        const std::string path = (fs::path(sc.output_dir) / name).string();
        write_file(path, content);
        manifest["files"].push_back(
            {{"path", path}, {"fnv1a64", fnv1a64_hex(content)}, {"bytes", content.size()}});
    }
    const std::string manifest_path = (fs::path(sc.output_dir) / "manifest.json").string();
    write_file(manifest_path, manifest.dump(2) + "\n");
    return manifest;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LinearFit fit;
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_res = syy - fit.intercept * sy - fit.slope * sxy;
    const double ss_tot = syy - sy * sy / n;
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

SweepTarget sweep_target_from_string(const std::string& name) {
    if (name == "MacroMeans" || name == "macro_means") return SweepTarget::MacroMeans;
    if (name == "FluctCov" || name == "fluct_cov") return SweepTarget::FluctCov;
    if (name == "PairCorr" || name == "pair_corr") return SweepTarget::PairCorr;
    throw ConfigError("unknown sweep target: " + name);
}

nlohmann::json convergence_sweep(const Scenario& sc, SweepTarget target) {
    if (sc.n_values.size() < 3) throw ConfigError("sweep requires >= 3 n_values");
    const Eigen::Matrix3d B = sc.kossakowski.B;
    const Eigen::Matrix3d A = sc.kossakowski.A;

    nlohmann::json report;
    report["per_N"] = nlohmann::json::array();

    if (target == SweepTarget::MacroMeans || target == SweepTarget::FluctCov) {
        const auto grid = linspace(0.0, sc.t_max, 26);
        const MacroTrajectory macro = integrate_macro(sc.initial_bloch, B, grid,
                                                      std::min(sc.tol, 1e-10));
        const auto meso = integrate_covariance(sc.initial_covariance, macro, A, B,
                                               std::min(sc.tol, 1e-10));
        std::vector<double> logN, logE;
        bool monotone = true;
        double prev = 0.0;
        for (std::size_t iN = 0; iN < sc.n_values.size(); ++iN) {
            const int N = sc.n_values[iN];
            SingleSiteState site{sc.initial_bloch};
            const auto state0 = build_product_state(N, site, Representation::Sectors);
            EvolveOptions opts;
            opts.tol = sc.tol;
            const auto traj = evolve_micro(state0, sc.kossakowski, grid, opts);
            double err = 0.0;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                const MicroObservables obs = collective_observables(traj[i].second);
                if (target == SweepTarget::MacroMeans) {
                    err = std::max(err, (obs.mean - macro.states[i]).norm());
                } else {
                    err = std::max(err,
                                   (obs.fluct_cov - meso[i].Sigma).cwiseAbs().maxCoeff());
                }
            }
            report["per_N"].push_back({{"N", N}, {"value", err}});
            if (iN > 0 && err >= prev) monotone = false;
            prev = err;
            logN.push_back(std::log(static_cast<double>(N)));
            logE.push_back(std::log(std::max(err, 1e-300)));
        }
        const LinearFit fit = linear_fit(logN, logE);
        report["slope"] = fit.slope;
        report["intercept"] = fit.intercept;
        report["r2"] = fit.r2;
        report["monotone_decreasing"] = monotone;
        report["axes"] = "log-log";
        return report;
    }

    // PairCorr: N * C_12 at t = 10/b against both normalization candidates.
    const CanonicalFrame frame = canonical_frame(sc.kossakowski, sc.initial_bloch);
    const double b = frame.lambda * frame.omega_rot(2);
    if (b <= 0) throw ConfigError("PairCorr sweep requires a stable stationary triple (b > 0)");
    const double t_star = 10.0 / b;
    const auto grid = linspace(0.0, t_star, 11);

    const MacroTrajectory macro =
        integrate_macro(sc.initial_bloch, B, grid, std::min(sc.tol, 1e-10));
    const auto meso = integrate_covariance(sc.initial_covariance, macro, A, B,
                                           std::min(sc.tol, 1e-10));
    const double candidate_flow = meso.back().Sigma(0, 1);
    const double candidate_no_xi = -frame.A_rot(0, 1) / (2.0 * std::abs(b));

    std::vector<double> invN, scaled;
    for (int N : sc.n_values) {
        SingleSiteState site{sc.initial_bloch};
        const auto state0 = build_product_state(N, site, Representation::Sectors);
        EvolveOptions opts;
        opts.tol = sc.tol;
        const auto traj = evolve_micro(state0, sc.kossakowski, grid, opts);
        const double value = N * pair_correlation_12(traj.back().second);
        report["per_N"].push_back({{"N", N}, {"value", value}});
        invN.push_back(1.0 / N);
        scaled.push_back(value);
    }
    const LinearFit fit = linear_fit(invN, scaled);
    report["slope"] = fit.slope;
    report["intercept"] = fit.intercept;
    report["r2"] = fit.r2;
    report["axes"] = "1/N";
    report["t_star"] = t_star;
    report["candidates"] = {{"flow", candidate_flow}, {"no_xi", candidate_no_xi}};
    const double last = scaled.back();
    auto close = [&](double c) { return std::abs(last - c) <= 0.10 * std::abs(c); };
    std::string verdict = "none";
    if (close(candidate_flow) && close(candidate_no_xi)) verdict = "both";
    else if (close(candidate_flow)) verdict = "flow";
    else if (close(candidate_no_xi)) verdict = "no_xi";
    report["verdict"] = verdict;
    return report;
}

}  // namespace spinchain
