#ifndef SPINCHAIN_ERRORS_HPP
#define SPINCHAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spinchain {

struct NotHermitian : std::runtime_error {
    explicit NotHermitian(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPositive : std::runtime_error {
    explicit NotPositive(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepFailure : std::runtime_error {
    explicit StepFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeExceeded : std::runtime_error {
    explicit SizeExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoStationaryState : std::runtime_error {
    explicit NoStationaryState(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateLength : std::runtime_error {
    explicit DegenerateLength(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotExchangeSymmetric : std::runtime_error {
    explicit NotExchangeSymmetric(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinchain

#endif
