#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bornwalk {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Tolerance defaults used throughout (module-level configuration per the
// library contracts).
struct Tolerances {
    double construction = 1e-10;   // unitarity of constructed matrices
    double algebraic = 1e-12;      // exact algebraic identities
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, invalid c0, unknown keys.
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure: log branch cut, construction failure, starved solve.
struct NumericalError : Error {
    using Error::Error;
};

} // namespace bornwalk
