#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sns {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Error taxonomy maps onto the CLI exit codes: ConfigError -> 2,
// BlowUpError -> 3, ConsistencyError -> 4, anything else -> 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class BlowUpError : public Error {
public:
    BlowUpError(const std::string& msg, double t) : Error(msg), time(t) {}
    double time;
};

class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

class AliasingError : public Error {
public:
    explicit AliasingError(const std::string& msg) : Error(msg) {}
};

inline const char* version_string() { return "sns 1.0.0"; }

} // namespace sns
