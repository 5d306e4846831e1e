#pragma once

#include <stdexcept>
#include <string>

namespace stabias {

enum class ErrorKind {
    NonStationary,
    NonConvergence,
    Indeterminacy,
    NoStableSolution,
    SingularRule,
    ObjectiveFailure,
    InvalidParams,
    InvalidModel,
    ParseError,
    UnknownKey,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonStationary: return "NonStationary";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::Indeterminacy: return "Indeterminacy";
        case ErrorKind::NoStableSolution: return "NoStableSolution";
        case ErrorKind::SingularRule: return "SingularRule";
        case ErrorKind::ObjectiveFailure: return "ObjectiveFailure";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownKey: return "UnknownKey";
    }
    return "Unknown";
}

/// Base of every failure raised by the library. `kind()` is what sweeps
/// inspect to flag a grid point instead of aborting.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Blanchard-Kahn count mismatch. Carries the counts so callers can report them.
class DeterminacyError : public Error {
public:
    DeterminacyError(ErrorKind kind, int stable, int predetermined, const std::string& context = {})
        : Error(kind, "stable roots " + std::to_string(stable) + ", predetermined " +
                          std::to_string(predetermined) + (context.empty() ? "" : " (" + context + ")")),
          stable_(stable),
          predetermined_(predetermined) {}

    int stable_count() const noexcept { return stable_; }
    int predetermined_count() const noexcept { return predetermined_; }

private:
    int stable_;
    int predetermined_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace stabias
