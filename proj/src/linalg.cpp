#include "sparsets/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sparsets/error.hpp"

namespace sparsets {

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  const Eigen::Index p = h.rows();
  Eigen::MatrixXd embed(2 * p, 2 * p);
  const Eigen::MatrixXd re = 0.5 * (h.real() + h.real().transpose());
  const Eigen::MatrixXd im = 0.5 * (h.imag() - h.imag().transpose());
  embed << re, -im, im, re;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(embed, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian eigensolver failed");
  Eigen::VectorXd out(p);
  for (Eigen::Index i = 0; i < p; ++i) out(i) = es.eigenvalues()(2 * i);
  return out;
}

EigenRange hermitian_eigen_range(const Eigen::MatrixXcd& h) {
  if (h.rows() == 1) {
    const double v = h(0, 0).real();
    return {v, v};
  }
  if (h.rows() == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double b2 = std::norm(0.5 * (h(0, 1) + std::conj(h(1, 0))));
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b2);
    return {mid - rad, mid + rad};
  }
  const Eigen::VectorXd ev = hermitian_eigenvalues(h);
  return {ev(0), ev(ev.size() - 1)};
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  return es.eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& s) { return symmetric_eigenvalues(s)(0); }

double max_eigenvalue(const Eigen::MatrixXd& s) {
  const Eigen::VectorXd ev = symmetric_eigenvalues(s);
  return ev(ev.size() - 1);
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& s, std::string_view what) {
  if (s.rows() != s.cols()) {
    throw InvalidArgument(std::string(what) + ": covariance must be square");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": covariance is not positive definite");
  }
  return llt.matrixL();
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double pivot_guard) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  if (llt.info() != Eigen::Success) throw NumericalError("normal equations are singular");
  const Eigen::VectorXd piv = Eigen::MatrixXd(llt.matrixL()).diagonal();
  if (piv.cwiseAbs2().minCoeff() < pivot_guard * scale) {
    throw NumericalError("normal equations are singular (pivot below guard)");
  }
  return llt.solve(b);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on companion matrix");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace sparsets
