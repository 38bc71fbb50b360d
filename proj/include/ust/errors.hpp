#pragma once

#include <stdexcept>
#include <string>

namespace ust {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured size limit (vertices, trees, paths, fiber members) would be exceeded.
class ResourceLimitError : public Error {
public:
    using Error::Error;
};

/// A random walk ran past its step budget before its stopping rule fired.
class StepBudgetExceeded : public Error {
public:
    using Error::Error;
};

class UnknownEdgeError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class EndpointMismatchError : public Error {
public:
    using Error::Error;
};

class NotATreeError : public Error {
public:
    using Error::Error;
};

/// Caller violated a documented precondition (disconnected input, bad enumeration, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace ust
