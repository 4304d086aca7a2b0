#pragma once

#include <stdexcept>
#include <string>

namespace ghap {

/// File / stream level failure: bad schema, truncated payload, unknown format.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: degenerate covariance, non-PSD matrix, non-finite input.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ghap
