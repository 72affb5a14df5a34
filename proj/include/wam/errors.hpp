#ifndef WAM_ERRORS_HPP
#define WAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wam {

// Error taxonomy mirrors the CLI exit codes: config=2, data=3, fit=4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wam

#endif
