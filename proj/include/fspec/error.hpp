#ifndef FSPEC_ERROR_HPP
#define FSPEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fspec {

enum class ErrorKind {
    usage,          // bad command line or call contract (e.g. theta = 0 for an integral energy)
    configuration,  // invalid measure description or file
    budget,         // lattice point / quadrature node budget exceeded
    estimation,     // not enough usable shells for a regression
    internal,
};

/// Base of every error thrown by the library. The kind maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(ErrorKind::budget, what) {}
};

class EstimationError : public Error {
public:
    explicit EstimationError(const std::string& what) : Error(ErrorKind::estimation, what) {}
};

/// 0 success, 2 usage, 3 configuration, 4 budget, 5 internal.
inline int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::usage: return 2;
    case ErrorKind::configuration: return 3;
    case ErrorKind::budget: return 4;
    case ErrorKind::estimation: return 5;
    case ErrorKind::internal: return 5;
    }
    return 5;
}

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::budget: return "budget";
    case ErrorKind::estimation: return "estimation";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

} // namespace fspec

#endif
