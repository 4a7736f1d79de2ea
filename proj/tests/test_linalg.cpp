#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

using namespace sparsets;
using cd = std::complex<double>;

TEST_CASE("hermitian eigenvalues of a 2x2 against the quadratic formula") {
  Eigen::MatrixXcd h(2, 2);
  h << cd(2, 0), cd(1, 1), cd(1, -1), cd(3, 0);
  // trace 5, det 6 - 2 = 4 -> (5 +- 3) / 2
  const auto ev = hermitian_eigenvalues(h);
  REQUIRE(ev.size() == 2);
  CHECK(ev(0) == doctest::Approx(1.0));
  CHECK(ev(1) == doctest::Approx(4.0));
  const auto r = hermitian_eigen_range(h);
  CHECK(r.min == doctest::Approx(1.0));
  CHECK(r.max == doctest::Approx(4.0));
}

TEST_CASE("hermitian eigenvalues agree with the complex solver for p = 4") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(4, 4);
  Eigen::MatrixXcd h = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const auto ev = hermitian_eigenvalues(h);
  for (int i = 0; i < 4; ++i) CHECK(ev(i) == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
  const auto r = hermitian_eigen_range(h);
  CHECK(r.min == doctest::Approx(es.eigenvalues()(0)));
  CHECK(r.max == doctest::Approx(es.eigenvalues()(3)));
}

TEST_CASE("symmetry checks") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 2, 2, 1;
  CHECK(is_symmetric(s));
  s(0, 1) = 2.1;
  CHECK_FALSE(is_symmetric(s));
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = cd(1, 0.5);
  CHECK_FALSE(is_hermitian(h));
}

TEST_CASE("cholesky and spd solves") {
  Eigen::MatrixXd s(2, 2);
  s << 4, 2, 2, 3;
  const auto l = cholesky_lower(s, "s");
  CHECK((l * l.transpose() - s).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd b(2, 1);
  b << 1, 2;
  const auto x = solve_spd(s, b);
  CHECK((s * x - b).norm() < 1e-12);

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky_lower(bad, "bad"), NumericalError);
  CHECK_THROWS_AS(solve_spd(Eigen::MatrixXd::Zero(2, 2), b), NumericalError);
}

TEST_CASE("spectral radius of a rotation-scaled matrix") {
  Eigen::MatrixXd m(2, 2);
  m << 0, -0.7, 0.7, 0;  // eigenvalues +-0.7i
  CHECK(spectral_radius(m) == doctest::Approx(0.7));
  CHECK(min_eigenvalue(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
}
