#pragma once

#include <stdexcept>
#include <string>

namespace kneck {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument hits a Gamma pole or a removable singularity of a closed form.
class PoleError : public Error {
public:
    using Error::Error;
};

// Argument outside the validity region of an evaluator.
class DomainError : public Error {
public:
    using Error::Error;
};

// Series, quadrature or iteration did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Eigenvalue lies in the degenerate set where sqrt(9 + 4 lambda^2) is an integer.
class SigmaError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

// Interpolation zones of the corrected h do not fit into [-1, 1/2].
class ZoneError : public Error {
public:
    using Error::Error;
};

// Base point is outside the regime of the requested limit comparison.
class RegimeError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kneck
