// Shared scalar/matrix aliases and the error types thrown across the library.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qoc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Operands of a matrix operation do not share the required square dimension.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A domain type's invariant is violated (non-Hermitian state, bad bounds, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A config file could not be parsed at the syntax level.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A config key is present but carries no value.
struct MissingField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The control direction is singular at this state: the feasibility slope
/// vanishes, so no boundary control exists.
struct SingularControlDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The initial state violates the coherence constraint band.
struct InfeasibleStart : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An integration or sweep produced a non-finite value.
struct NonFiniteIterate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Largest absolute entry of (m - m^dagger); zero for exactly Hermitian m.
inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Largest absolute entry; the max-norm used by convergence metrics.
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qoc
