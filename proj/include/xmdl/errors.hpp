#pragma once

#include <stdexcept>
#include <string>

namespace xmdl {

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// An integral that is provably +infinity where a finite value was required.
struct DivergentError : std::runtime_error {
    explicit DivergentError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature could not certify either convergence or divergence.
struct InconclusiveError : std::runtime_error {
    explicit InconclusiveError(const std::string& what) : std::runtime_error(what) {}
};

struct NotNormalizable : std::runtime_error {
    explicit NotNormalizable(const std::string& what) : std::runtime_error(what) {}
};

// A prediction system queried before its conditioning set contains (m, xbar).
struct NotYetDefined : std::runtime_error {
    explicit NotYetDefined(const std::string& what) : std::runtime_error(what) {}
};

struct KraftViolation : std::runtime_error {
    explicit KraftViolation(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleHorizon : std::runtime_error {
    explicit InfeasibleHorizon(const std::string& what) : std::runtime_error(what) {}
};

struct StreamUnderflow : std::runtime_error {
    explicit StreamUnderflow(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroProbability : std::runtime_error {
    explicit ZeroProbability(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xmdl
