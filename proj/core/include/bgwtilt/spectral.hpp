#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace bgwtilt {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows);

/// Spectral radius of a nonnegative matrix. Power iteration on M + I (shifting
/// makes the Perron root strictly dominant for irreducible matrices); falls
/// back to a dense eigensolver for reducible or otherwise non-converging
/// inputs. Absolute accuracy ~1e-12. Non-finite entries raise NumericalError.
double spectral_radius(const Eigen::MatrixXd& m);

inline double spectral_radius(const std::vector<std::vector<double>>& rows) {
    return spectral_radius(to_eigen(rows));
}

/// Eigenvalue multiset, sorted by (real, imag) for comparisons.
std::vector<std::complex<double>> eigenvalue_multiset(const Eigen::MatrixXd& m);

/// Right 1-eigenvector of a critical nonnegative matrix (|rho - 1| <= tol
/// required), positive and normalised to r[0] = 1. Computed as the smallest
/// singular direction of M - I, so the residual ||Mr - r|| tracks the
/// criticality defect.
Eigen::VectorXd perron_right_unit_eigenvector(const Eigen::MatrixXd& m, double rho_tol = 1e-6);

} // namespace bgwtilt
