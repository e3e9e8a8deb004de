// Error types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace squidmw {

/// A truncated Fock space was too small for the requested state (the discarded
/// tail weight exceeded the tolerance). Callers recover by raising the dimension.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// A constructed state failed its hermiticity / trace / positivity gate.
class StateValidationError : public std::runtime_error {
public:
    explicit StateValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested analytic closed form does not exist for this state.
class NoAnalyticFormError : public std::domain_error {
public:
    explicit NoAnalyticFormError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace squidmw
