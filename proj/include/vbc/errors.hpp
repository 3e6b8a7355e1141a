#pragma once

#include <stdexcept>
#include <string>

namespace vbc {

// Bad or inconsistent input data (malformed files, contract violations on values).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-finite loss, divergent optimization).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vbc
