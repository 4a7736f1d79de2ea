#pragma once

#include <string_view>

#include <Eigen/Core>

namespace sparsets {

/// Eigenvalues (ascending) of a Hermitian matrix, computed by the symmetric
/// solver on the real embedding [[Re, -Im], [Im, Re]]. Each eigenvalue of the
/// embedding appears twice; one copy of each is returned.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h);

/// Extreme eigenvalues of a Hermitian matrix, with a closed form for p <= 2.
struct EigenRange {
  double min;
  double max;
};
EigenRange hermitian_eigen_range(const Eigen::MatrixXcd& h);

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& s);
double min_eigenvalue(const Eigen::MatrixXd& s);
double max_eigenvalue(const Eigen::MatrixXd& s);

bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10);
bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-10);

/// Lower Cholesky factor; throws NumericalError mentioning `what` when the
/// matrix is not numerically positive definite.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& s, std::string_view what);

/// Solves the SPD system `a x = b` by Cholesky. Pivots below
/// `pivot_guard * max(1, max diag)` are rejected as singular.
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double pivot_guard = 1e-10);

/// Spectral radius (largest eigenvalue modulus) of a real square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace sparsets
