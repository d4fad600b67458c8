#pragma once
// Scalar and matrix aliases shared by every module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace emspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex I{0.0, 1.0};

// Bad input: maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Integrator/solver breakdown: maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// max |A - A^H| relative to max |A|; 0 for the zero matrix.
inline double hermiticity_defect(const Matrix& a) {
    double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

} // namespace emspec
