#pragma once

#include <stdexcept>
#include <string>

namespace decolab {

// Malformed configuration or out-of-range user input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data that cannot be parsed or violates a data invariant.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical method was asked to operate outside its validity domain.
class ValidityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace decolab
