#pragma once

#include <stdexcept>
#include <string>

namespace subembed {

// Base of every error thrown by the library. The CLI maps all of these to
// exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid ensemble descriptor or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Arguments outside an operation's documented domain.
class InputError : public Error {
public:
    using Error::Error;
};

// Incompatible ambient or subspace dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Spanning set with no numerically nonzero direction.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// A requested object would exceed a configured size budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Missing, unreadable, or malformed files.
class IoError : public Error {
public:
    using Error::Error;
};

// A family failed its pairwise Grassmann separation requirement.
class SeparationError : public Error {
public:
    SeparationError(const std::string& what, std::size_t first, std::size_t second)
        : Error(what), first_(first), second_(second) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

}  // namespace subembed
