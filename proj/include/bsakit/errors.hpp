#ifndef BSAKIT_ERRORS_HPP
#define BSAKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsakit {

/// Base class for all bsakit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or out-of-contract input (bad dimensions, non-normalized
/// vectors, violated state invariants, unparsable files).
struct InvalidInput : Error {
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// A matrix required to be positive semidefinite is not.
struct NotPositive : Error {
    explicit NotPositive(const std::string& msg) : Error(msg) {}
};

/// A state required to have a positive partial transpose does not.
struct NotPpt : Error {
    explicit NotPpt(const std::string& msg) : Error(msg) {}
};

/// A vector that must lie in the range of a matrix does not.
struct RangeViolation : Error {
    explicit RangeViolation(const std::string& msg) : Error(msg) {}
};

/// A matrix does not have the rank an operation requires.
struct WrongRank : Error {
    explicit WrongRank(const std::string& msg) : Error(msg) {}
};

/// A decomposition degenerates (zero coefficient where a nonzero one
/// is needed).
struct Degenerate : Error {
    explicit Degenerate(const std::string& msg) : Error(msg) {}
};

/// Internal consistency failure; indicates a bug, not bad input.
struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

} // namespace bsakit

#endif
