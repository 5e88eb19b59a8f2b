#pragma once

#include <stdexcept>
#include <string>

namespace bellmono {

// Raised when an operation's input or result breaks a named invariant.
// `invariant()` is a stable machine-readable tag; what() carries context.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string invariant, const std::string& message)
        : std::runtime_error(invariant + ": " + message), invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

// Bad command-line usage (unparseable flag values, missing arguments).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bellmono
