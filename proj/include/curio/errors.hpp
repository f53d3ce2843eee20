#pragma once

#include <stdexcept>
#include <string>

namespace curio {

// Error taxonomy shared by all modules. Callers that violate a documented
// precondition get one of these rather than UB.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OrderingError : std::runtime_error {
    explicit OrderingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AnalysisError : std::runtime_error {
    explicit AnalysisError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ModelUnavailableError : std::runtime_error {
    explicit ModelUnavailableError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace curio
