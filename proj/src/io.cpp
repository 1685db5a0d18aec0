#include "spinchain/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string macro_trajectory_csv(const MacroTrajectory& traj) {
    std::ostringstream os;
    os << "t,omega1,omega2,omega3,norm\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& w = traj.states[i];
        os << format_double(traj.times[i]) << ',' << format_double(w(0)) << ','
           << format_double(w(1)) << ',' << format_double(w(2)) << ','
           << format_double(w.norm()) << '\n';
    }
    return os.str();
}

std::string covariance_csv(const std::vector<CovarianceState>& states) {
    std::ostringstream os;
    os << "t,S11,S12,S13,S22,S23,S33\n";
    for (const auto& cs : states) {
        const auto& S = cs.Sigma;
        os << format_double(cs.t) << ',' << format_double(S(0, 0)) << ','
           << format_double(S(0, 1)) << ',' << format_double(S(0, 2)) << ','
           << format_double(S(1, 1)) << ',' << format_double(S(1, 2)) << ','
           << format_double(S(2, 2)) << '\n';
    }
    return os.str();
}

std::string micro_observables_csv(const std::vector<MicroObservables>& rows) {
    std::ostringstream os;
    os << "t,m1,m2,m3,S11,S12,S13,S22,S23,S33,C12pair\n";
    for (const auto& r : rows) {
        os << format_double(r.t) << ',' << format_double(r.mean(0)) << ','
           << format_double(r.mean(1)) << ',' << format_double(r.mean(2)) << ','
           << format_double(r.fluct_cov(0, 0)) << ',' << format_double(r.fluct_cov(0, 1)) << ','
           << format_double(r.fluct_cov(0, 2)) << ',' << format_double(r.fluct_cov(1, 1)) << ','
           << format_double(r.fluct_cov(1, 2)) << ',' << format_double(r.fluct_cov(2, 2)) << ','
           << format_double(r.pair_corr_12) << '\n';
    }
    return os.str();
}

std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
}

}  // namespace spinchain
