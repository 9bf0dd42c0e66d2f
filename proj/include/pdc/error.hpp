#pragma once

#include <stdexcept>
#include <string>

namespace pdc {

// Error categories map 1:1 onto CLI exit codes; keep the ids stable.
enum class ErrorCategory {
    config = 2,
    geometry = 3,
    domain = 4,
    analysis = 5,
    fit = 6,
    io = 7,
    integrity = 8,
};

inline const char* category_name(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::geometry: return "geometry";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::analysis: return "analysis";
    case ErrorCategory::fit: return "fit";
    case ErrorCategory::io: return "io";
    case ErrorCategory::integrity: return "integrity";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), cat_(cat) {}
    ErrorCategory category() const { return cat_; }

private:
    ErrorCategory cat_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};
struct GeometryError : Error {
    explicit GeometryError(const std::string& m) : Error(ErrorCategory::geometry, m) {}
};
// out-of-model physical input, e.g. a transverse momentum outside the light cone
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorCategory::domain, m) {}
};
struct AnalysisError : Error {
    explicit AnalysisError(const std::string& m) : Error(ErrorCategory::analysis, m) {}
};
struct FitError : Error {
    explicit FitError(const std::string& m) : Error(ErrorCategory::fit, m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};
struct IntegrityError : Error {
    explicit IntegrityError(const std::string& m) : Error(ErrorCategory::integrity, m) {}
};

} // namespace pdc
