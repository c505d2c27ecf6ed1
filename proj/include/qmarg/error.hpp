#pragma once

#include <stdexcept>
#include <string>

namespace qmarg {

/// Malformed arguments or data (mismatched sizes, bad partitions, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured size cap was exceeded.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested feature outside what this release handles.
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An identity that must hold by construction was violated.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An iterative solver stopped without converging.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qmarg
