#ifndef SPINCHAIN_SCENARIO_HPP
#define SPINCHAIN_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinchain/algebra.hpp"

namespace spinchain {

struct FockConfig {
    double b = 1.0;
    int n_max = 30;
};

struct Scenario {
    KossakowskiSpec kossakowski;
    Eigen::Vector3d initial_bloch = Eigen::Vector3d::Zero();
    Eigen::Matrix3d initial_covariance = Eigen::Matrix3d::Zero();  // I/4 - w w^T by default
    std::vector<int> n_values;
    double t_max = 5.0;
    double tol = 1e-8;
    std::optional<FockConfig> fock;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    nlohmann::json echo;  // the raw config, reproduced in the manifest
};

enum RunParts : unsigned {
    kRunMacro = 1u << 0,
    kRunMeso = 1u << 1,
    kRunMicro = 1u << 2,
    kRunFock = 1u << 3,
    kRunAll = kRunMacro | kRunMeso | kRunMicro | kRunFock,
};

enum class SweepTarget { MacroMeans, FluctCov, PairCorr };

// Throws ConfigError on structural problems; NotHermitian/NotPositive come
// from Kossakowski validation.
Scenario parse_scenario(const nlohmann::json& cfg);
Scenario load_scenario(const std::string& path);

// Runs the configured pipelines, writes CSV/JSON outputs plus a manifest
// (file list, checksums, config echo) under scenario.output_dir, and
// returns the manifest.
nlohmann::json run_scenario(const Scenario& scenario, unsigned parts = kRunAll);

// Runs microsim across n_values and fits the convergence law of the target.
nlohmann::json convergence_sweep(const Scenario& scenario, SweepTarget target);

SweepTarget sweep_target_from_string(const std::string& name);

// Ordinary least squares y = slope * x + intercept with r^2.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spinchain

#endif
