#pragma once

#include <stdexcept>
#include <string>

namespace oriole {

/// Invalid caller-supplied input: bad configuration, empty dataset, malformed file.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or size mismatch between operands.
class DimensionError : public InputError {
public:
    explicit DimensionError(const std::string& msg) : InputError(msg) {}
};

/// Non-finite values encountered mid-computation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oriole
