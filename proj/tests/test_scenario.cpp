#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "spinchain/errors.hpp"
#include "spinchain/io.hpp"
#include "spinchain/scenario.hpp"

using namespace spinchain;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_config(const std::string& out_dir) {
    return {
        {"kossakowski",
         {{"dim", 3},
          {"re", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}},
          {"im", {{0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}}}},
        {"initial_bloch", {0.3, 0.0, 0.4}},
        {"n_values", {4, 6}},
        {"t_max", 1.0},
        {"tol", 1e-8},
        {"seed", 17},
        {"output_dir", out_dir},
    };
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parsing validates structure and physics") {
    CHECK_THROWS_AS(parse_scenario(nlohmann::json::object()), ConfigError);

    auto cfg = base_config("/tmp/spinchain_cfg");
    const Scenario sc = parse_scenario(cfg);
    CHECK(sc.kossakowski.dim == 3);
    CHECK(sc.t_max == 1.0);
    CHECK(sc.n_values == std::vector<int>{4, 6});
    // Default covariance is I/4 - w w^T.
    const Eigen::Vector3d w(0.3, 0.0, 0.4);
    CHECK((sc.initial_covariance -
           (Eigen::Matrix3d::Identity() / 4.0 - w * w.transpose()))
              .norm() < 1e-14);

    SUBCASE("non-PSD Kossakowski rejected") {
        auto bad = cfg;
        bad["kossakowski"]["re"] = {{-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        bad["kossakowski"]["im"] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        CHECK_THROWS_AS(parse_scenario(bad), NotPositive);
    }
    SUBCASE("overlong Bloch vector rejected") {
        auto bad = cfg;
        bad["initial_bloch"] = {0.5, 0.5, 0.5};
        CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
    }
    SUBCASE("bad n_values rejected") {
        auto bad = cfg;
        bad["n_values"] = {4, 500};
        CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
    }
}

TEST_CASE("run_scenario writes every file it lists and nothing else") {
    const std::string dir = "/tmp/spinchain_manifest_test";
    fs::remove_all(dir);
    const Scenario sc = parse_scenario(base_config(dir));
    const auto manifest = run_scenario(sc, kRunMacro | kRunMeso | kRunMicro);

    std::size_t listed = 0;
    for (const auto& f : manifest["files"]) {
        const std::string path = f["path"].get<std::string>();
        CHECK(fs::exists(path));
        CHECK(fnv1a64_hex(slurp(path)) == f["fnv1a64"].get<std::string>());
        ++listed;
    }
    // macro.csv, meso.csv, channel.json, micro_N4.csv, micro_N6.csv
    CHECK(listed == 5);
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++on_disk;
    }
    CHECK(on_disk == listed + 1);  // + manifest.json
    CHECK(manifest["config"] == sc.echo);
}

TEST_CASE("identical configs reproduce byte-identical outputs") {
    const std::string dir_a = "/tmp/spinchain_repro_a";
    const std::string dir_b = "/tmp/spinchain_repro_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    auto cfg_a = base_config(dir_a);
    auto cfg_b = base_config(dir_b);
    const auto ma = run_scenario(parse_scenario(cfg_a), kRunMacro | kRunMeso | kRunMicro);
    const auto mb = run_scenario(parse_scenario(cfg_b), kRunMacro | kRunMeso | kRunMicro);
    REQUIRE(ma["files"].size() == mb["files"].size());
    for (std::size_t i = 0; i < ma["files"].size(); ++i) {
        CHECK(ma["files"][i]["fnv1a64"] == mb["files"][i]["fnv1a64"]);
    }
}

TEST_CASE("D = 0 freezes every pipeline") {
    const std::string dir = "/tmp/spinchain_zero_d";
    fs::remove_all(dir);
    auto cfg = base_config(dir);
    cfg["kossakowski"]["re"] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    cfg["kossakowski"]["im"] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    cfg["n_values"] = {4};
    const auto manifest = run_scenario(parse_scenario(cfg), kRunMacro | kRunMicro);
    CHECK(manifest["files"].size() == 2);

    // Every CSV row repeats the initial observables.
    const std::string macro_csv = slurp(dir + "/macro.csv");
    std::istringstream lines(macro_csv);
    std::string header, first, line;
    std::getline(lines, header);
    CHECK(header == "t,omega1,omega2,omega3,norm");
    std::getline(lines, first);
    const std::string tail = first.substr(first.find(','));
    int rows = 1;
    while (std::getline(lines, line)) {
        CHECK(line.substr(line.find(',')) == tail);
        ++rows;
    }
    CHECK(rows == 401);
}

TEST_CASE("CSV headers follow the documented layout") {
    const std::string dir = "/tmp/spinchain_headers";
    fs::remove_all(dir);
    auto cfg = base_config(dir);
    cfg["n_values"] = {4};
    run_scenario(parse_scenario(cfg), kRunMacro | kRunMeso | kRunMicro);
    const std::string meso = slurp(dir + "/meso.csv");
    CHECK(meso.substr(0, meso.find('\n')) == "t,S11,S12,S13,S22,S23,S33");
    const std::string micro = slurp(dir + "/micro_N4.csv");
    CHECK(micro.substr(0, micro.find('\n')) ==
          "t,m1,m2,m3,S11,S12,S13,S22,S23,S33,C12pair");
}

TEST_CASE("format_double round-trips exactly") {
    for (double x : {0.1, 1.0 / 3.0, 6.02e23, -7.25e-31, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("macro means sweep fits a negative slope on tiny sizes") {
    Scenario sc = parse_scenario(base_config("/tmp/unused"));
    sc.n_values = {4, 8, 16};
    sc.t_max = 1.0;
    sc.tol = 1e-8;
    const auto report = convergence_sweep(sc, SweepTarget::MacroMeans);
    CHECK(report["per_N"].size() == 3);
    CHECK(report["slope"].get<double>() < 0.0);
    CHECK(report["axes"] == "log-log");
    Scenario two = sc;
    two.n_values = {4, 8};
    CHECK_THROWS_AS(convergence_sweep(two, SweepTarget::MacroMeans), ConfigError);
}

TEST_CASE("sweep target names parse") {
    CHECK(sweep_target_from_string("MacroMeans") == SweepTarget::MacroMeans);
    CHECK(sweep_target_from_string("fluct_cov") == SweepTarget::FluctCov);
    CHECK(sweep_target_from_string("PairCorr") == SweepTarget::PairCorr);
    CHECK_THROWS_AS(sweep_target_from_string("bogus"), ConfigError);
}

TEST_CASE("linear fit recovers an exact line") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{1.5, 3.5, 5.5, 7.5};
    const auto fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}
