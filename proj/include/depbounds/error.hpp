#pragma once

#include <stdexcept>
#include <string>

namespace depbounds {

// Invalid numeric parameter or violated precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation not available for the given class / process / program kind.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Model and loss (or class and routine) that cannot be combined.
class IncompatibleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ParameterError(message);
}

}  // namespace depbounds
