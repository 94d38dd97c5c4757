#pragma once

#include <stdexcept>
#include <string>

namespace switchosc {

// Precondition violations (bad arguments, states off their manifold).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A requested root, crossing or orbit does not exist where it was searched for.
class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: tolerance not met, step underflow, iteration cap.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A regularized trajectory was captured by a slow manifold where a crossing was expected.
class CapturedError : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace switchosc
