#ifndef SPINCHAIN_IO_HPP
#define SPINCHAIN_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/macroflow.hpp"
#include "spinchain/mesoflow.hpp"
#include "spinchain/microsim.hpp"

namespace spinchain {

// Shortest round-trip-exact decimal representation (17 significant digits).
std::string format_double(double x);

std::string macro_trajectory_csv(const MacroTrajectory& traj);
std::string covariance_csv(const std::vector<CovarianceState>& states);
std::string micro_observables_csv(const std::vector<MicroObservables>& rows);

// FNV-1a 64-bit of a byte string, hex-encoded.
std::string fnv1a64_hex(const std::string& data);

void write_file(const std::string& path, const std::string& content);

}  // namespace spinchain

#endif
