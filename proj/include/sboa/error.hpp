#pragma once

#include <stdexcept>
#include <string>

namespace sboa {

// Bad or inconsistent configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed, misaligned or insufficient input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical routine failed to produce a usable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sboa
