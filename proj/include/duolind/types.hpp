#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace duolind {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Invalid parameter combinations (negative rates, cutoff out of budget, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Arguments outside an operation's domain (occupation out of range, t < 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Operands attached to spaces of different dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Matrix fails a density-matrix invariant at construction.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Generator not diagonalizable at the requested parameters.
struct RegimeError : std::domain_error {
  using std::domain_error::domain_error;
};

// Result corrupted by basis truncation; a larger cutoff is needed.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Brute-force integrator exceeded its step budget.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace duolind
