#pragma once

#include <stdexcept>
#include <string>

namespace ipdyn {

/// Thrown when an argument or parameter set violates a documented invariant.
/// The message starts with the offending field name.
class InvalidInput : public std::invalid_argument {
public:
    InvalidInput(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Thrown when a numerical procedure cannot produce a trustworthy result
/// (non-finite values, step budget exhausted, step underflow).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ipdyn
