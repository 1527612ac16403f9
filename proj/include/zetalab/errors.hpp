#pragma once

#include <stdexcept>
#include <string>

namespace zetalab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violated a documented precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The request is well-posed but outside what the implementation supports
/// (overflow budgets, node densities, heights, tolerances).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A prime table does not reach far enough for the requested sum.
class InsufficientTableError : public Error {
public:
    using Error::Error;
};

/// Schedule overrides or experiment configuration are inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class E>
[[noreturn]] inline void raise(const std::string& what)
{
    throw E(what);
}

inline void require(bool ok, const std::string& what)
{
    if (!ok) raise<DomainError>(what);
}

} // namespace detail
} // namespace zetalab
