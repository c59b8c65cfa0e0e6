#pragma once

#include <stdexcept>
#include <string>

namespace dhc {

/// Failure category; the numeric value doubles as the CLI exit code.
enum class ErrorKind : int {
    config = 1,     // invalid input or unmet precondition
    numerical = 2,  // solver failure or size guard
    oracle = 3,     // a cross-check did not hold
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

struct OracleError : Error {
    explicit OracleError(const std::string& what) : Error(ErrorKind::oracle, what) {}
};

}  // namespace dhc
