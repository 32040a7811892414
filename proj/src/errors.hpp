#pragma once

#include <stdexcept>
#include <string>

namespace sk {

// Error hierarchy shared by all modules. The C API maps each type to a status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-facing parameter (mu outside (0,1), non-positive interval, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numerical contract failed (Cholesky pivot loss, non-finite values, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Coefficient table too coarse for the requested integration step.
class StepSizeError : public Error {
public:
    using Error::Error;
};

// Evaluation at a branch endpoint of a boundary-value formula.
class BranchError : public Error {
public:
    using Error::Error;
};

// Evaluation at a pole of a closed-form expression.
class PoleError : public Error {
public:
    using Error::Error;
};

}  // namespace sk
