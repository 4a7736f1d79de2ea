#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sparsets/error.hpp"
#include "sparsets/rng.hpp"
#include "sparsets/spectral.hpp"

using namespace sparsets;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

ArmaSpec scalar_ar1(double a, double s2) {
  return ArmaSpec::var(VarPolynomial::scalar({a}), Eigen::MatrixXd::Constant(1, 1, s2));
}

double scalar_ar1_density(double a, double s2, double theta) {
  return s2 / (2 * pi * std::norm(1.0 - a * std::polar(1.0, -theta)));
}

// Random matrix rescaled to the requested spectral radius.
Eigen::MatrixXd random_with_radius(int p, double radius, CounterRng& rng) {
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  return a * (radius / es.eigenvalues().cwiseAbs().maxCoeff());
}

Eigen::MatrixXd random_spd(int p, CounterRng& rng) {
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  return g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

TEST_CASE("VarPolynomial validation") {
  CHECK_THROWS_AS(VarPolynomial(std::vector<Eigen::MatrixXd>{}), InvalidArgument);
  CHECK_THROWS_AS(VarPolynomial({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 3)}),
                  InvalidArgument);
  CHECK_THROWS_AS(VarPolynomial({Eigen::MatrixXd::Zero(2, 3)}), InvalidArgument);
  const auto z = VarPolynomial::zero(3, 2);
  CHECK(z.dim() == 3);
  CHECK(z.order() == 2);
}

TEST_CASE("companion matrix") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 3);
  CHECK(companion_matrix(VarPolynomial({a})) == a);

  const auto c = companion_matrix(VarPolynomial::scalar({1.2, -0.36}));
  Eigen::MatrixXd expect(2, 2);
  expect << 1.2, -0.36, 1, 0;
  CHECK(c == expect);

  const auto c0 = companion_matrix(VarPolynomial::zero(2, 2));
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(4, 4);
  e0.block(2, 0, 2, 2).setIdentity();
  CHECK(c0 == e0);
}

TEST_CASE("stability via companion radius") {
  auto s = is_stable(VarPolynomial::scalar({0.5}));
  CHECK(s.stable);
  CHECK(s.radius == doctest::Approx(0.5));

  s = is_stable(VarPolynomial::scalar({1.0}));
  CHECK_FALSE(s.stable);
  CHECK(s.radius == doctest::Approx(1.0));

  // 1 - 1.2 z + 0.36 z^2 = (1 - 0.6 z)^2: double root of x^2 - 1.2 x + 0.36 at 0.6
  s = is_stable(VarPolynomial::scalar({1.2, -0.36}));
  CHECK(s.stable);
  CHECK(s.radius == doctest::Approx(0.6).epsilon(1e-6));

  CHECK_FALSE(is_stable(VarPolynomial::scalar({0.5}), 0.6).stable);
}

TEST_CASE("characteristic polynomial") {
  const VarPolynomial poly({Eigen::MatrixXd::Random(2, 2), Eigen::MatrixXd::Random(2, 2)});
  CHECK((eval_char_poly(poly, 0.0) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);

  const double alpha = 0.3, theta = 0.7;
  const cd z = std::polar(1.0, -theta);
  CHECK(std::abs(eval_char_poly(VarPolynomial::scalar({alpha}), z)(0, 0) - (1.0 - alpha * z)) <
        1e-15);

  for (double x : {-0.9, 0.2, 1.5}) {
    const cd v = eval_char_poly(VarPolynomial::scalar({2 * alpha, -alpha * alpha}), x)(0, 0);
    CHECK(v.real() == doctest::Approx((1 - alpha * x) * (1 - alpha * x)));
    CHECK(std::abs(v.imag()) < 1e-15);
  }
}

TEST_CASE("frequency grid covers [-pi, pi)") {
  const auto g = frequency_grid(8);
  REQUIRE(g.size() == 8);
  CHECK(g.front() == doctest::Approx(-pi));
  CHECK(g[1] - g[0] == doctest::Approx(2 * pi / 8));
  CHECK(g.back() < pi);
}

TEST_CASE("spectral density closed forms") {
  const double s2 = 0.75;
  const auto wn = ArmaSpec::white_noise(s2 * Eigen::MatrixXd::Identity(3, 3));
  for (double th : {-2.0, 0.0, 1.3}) {
    const auto f = spectral_density(wn, th);
    CHECK((f.value - Eigen::MatrixXcd::Identity(3, 3) * (s2 / (2 * pi))).norm() < 1e-14);
  }

  const auto ar = scalar_ar1(0.5, s2);
  CHECK(spectral_density(ar, 0.0).value(0, 0).real() == doctest::Approx(0.47746).epsilon(1e-4));
  CHECK(spectral_density(ar, pi).value(0, 0).real() == doctest::Approx(0.05305).epsilon(1e-3));
  for (double th : {-2.5, -0.4, 0.9, 2.2})
    CHECK(spectral_density(ar, th).value(0, 0).real() ==
          doctest::Approx(scalar_ar1_density(0.5, s2, th)).epsilon(1e-12));

  // MA(1) X = e - b e_{t-1}: (s2 / 2pi) |1 - b e^{-i theta}|^2
  const double b = 0.4;
  const ArmaSpec ma(std::nullopt, VarPolynomial::scalar({b}), Eigen::MatrixXd::Constant(1, 1, s2));
  for (double th : {0.0, 1.0, pi}) {
    const double expect = s2 / (2 * pi) * std::norm(1.0 - b * std::polar(1.0, -th));
    CHECK(spectral_density(ma, th).value(0, 0).real() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("spectral density is Hermitian PSD and rejects unstable input") {
  CounterRng rng(RngSeed{21});
  const ArmaSpec spec = ArmaSpec::var(VarPolynomial({random_with_radius(3, 0.8, rng)}),
                                      random_spd(3, rng));
  for (const auto& f : spectrum_on_grid(spec, 64)) {
    CHECK((f.value - f.value.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f.value);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
  CHECK_THROWS_AS(spectral_density(scalar_ar1(1.0, 1.0), 0.3), InvalidArgument);
}

TEST_CASE("mu extremes") {
  const auto z = mu_extremes(VarPolynomial::zero(2));
  CHECK(z.min == doctest::Approx(1.0));
  CHECK(z.max == doctest::Approx(1.0));

  const double a = 0.5;
  const auto s = mu_extremes(VarPolynomial::scalar({a}));
  CHECK(s.min == doctest::Approx((1 - a) * (1 - a)).epsilon(1e-9));
  CHECK(s.max == doctest::Approx((1 + a) * (1 + a)).epsilon(1e-9));

  const auto d = mu_extremes(VarPolynomial({0.5 * Eigen::MatrixXd::Identity(3, 3)}));
  CHECK(d.min == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(d.max == doctest::Approx(2.25).epsilon(1e-9));
}

TEST_CASE("mu extremes match a dense independent scan") {
  CounterRng rng(RngSeed{5});
  const Eigen::MatrixXd a1 = random_with_radius(2, 0.7, rng);
  const Eigen::MatrixXd a2 = 0.2 * random_with_radius(2, 0.5, rng);
  const VarPolynomial poly({a1, a2});
  double lo = 1e300, hi = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const cd z = std::polar(1.0, -pi + 2 * pi * i / n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) - a1.cast<cd>() * z - a2.cast<cd>() * z * z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m);
    lo = std::min(lo, es.eigenvalues()(0));
    hi = std::max(hi, es.eigenvalues()(1));
  }
  const auto mu = mu_extremes(poly, 4096);
  CHECK(mu.min == doctest::Approx(lo).epsilon(1e-4));
  CHECK(mu.max == doctest::Approx(hi).epsilon(1e-4));
}

TEST_CASE("stability measures closed forms") {
  const auto wn = stability_measures(ArmaSpec::white_noise(2.0 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK(wn.m_upper == doctest::Approx(2.0 / (2 * pi)));
  CHECK(wn.m_lower == doctest::Approx(2.0 / (2 * pi)));

  const auto r = stability_measures(scalar_ar1(0.5, 0.75));
  CHECK(r.m_upper == doctest::Approx(0.47746).epsilon(1e-4));
  CHECK(r.m_lower == doctest::Approx(0.05305).epsilon(1e-3));
  CHECK(r.mu_min <= r.mu_max);
  CHECK(r.grid_size == kDefaultGridSize);

  // Independent columns with a common scalar spectrum: M/m = max f / min f.
  const auto ind = stability_measures(ArmaSpec::var(
      VarPolynomial({0.5 * Eigen::MatrixXd::Identity(3, 3)}), Eigen::MatrixXd::Identity(3, 3)));
  CHECK(ind.m_upper / ind.m_lower == doctest::Approx(2.25 / 0.25).epsilon(1e-9));
}

TEST_CASE("subprocess stability M(f, k)") {
  const auto wn = ArmaSpec::white_noise(0.75 * Eigen::MatrixXd::Identity(3, 3));
  CHECK(subprocess_stability(wn, 1).value == doctest::Approx(0.75 / (2 * pi)));

  // Diagonal spectrum diag(f_1, f_2): k = 1 picks the larger peak.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 0.3;
  a(1, 1) = -0.6;
  const auto diag = ArmaSpec::var(VarPolynomial({a}), Eigen::MatrixXd::Identity(2, 2));
  const double f1 = scalar_ar1_density(0.3, 1.0, 0.0);
  const double f2 = scalar_ar1_density(-0.6, 1.0, pi);
  const auto m1 = subprocess_stability(diag, 1);
  CHECK(m1.exact);
  CHECK(m1.value == doctest::Approx(std::max(f1, f2)).epsilon(1e-6));

  CounterRng rng(RngSeed{9});
  const auto spec =
      ArmaSpec::var(VarPolynomial({random_with_radius(4, 0.7, rng)}), random_spd(4, rng));
  const auto full = stability_measures(spec, 512);
  double prev = 0;
  for (int k = 1; k <= 5; ++k) {
    const auto mk = subprocess_stability(spec, k, 512);
    CHECK(mk.value >= prev - 1e-12);
    prev = mk.value;
  }
  CHECK(prev == doctest::Approx(full.m_upper));

  const std::vector<int> ks{1, 2, 3};
  const auto with_k = stability_measures(spec, 512, ks);
  REQUIRE(with_k.k_sparse.size() == 3);
  CHECK(with_k.k_sparse.at(1) <= with_k.k_sparse.at(2));
  CHECK(with_k.k_sparse.at(2) <= with_k.k_sparse.at(3));

  const auto capped = subprocess_stability(spec, 2, 512, 3);
  CHECK_FALSE(capped.exact);
  CHECK(capped.value == doctest::Approx(full.m_upper));
}

TEST_CASE("discrete Lyapunov solution against the Kronecker linear system") {
  CounterRng rng(RngSeed{33});
  for (int rep = 0; rep < 5; ++rep) {
    const int p = 2 + rep;
    const Eigen::MatrixXd a = random_with_radius(p, 0.9, rng);
    const Eigen::MatrixXd q = random_spd(p, rng);
    const Eigen::MatrixXd big =
        Eigen::MatrixXd::Identity(p * p, p * p) - Eigen::kroneckerProduct(a, a).eval();
    const Eigen::VectorXd vecq = Eigen::Map<const Eigen::VectorXd>(q.data(), p * p);
    const Eigen::VectorXd vx = big.partialPivLu().solve(vecq);
    const Eigen::MatrixXd oracle = Eigen::Map<const Eigen::MatrixXd>(vx.data(), p, p);

    const auto sol = solve_discrete_lyapunov(a, q);
    CHECK((sol.x - oracle).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, oracle.norm()));
    CHECK(sol.residual <= 1e-9);
  }
}

TEST_CASE("VAR autocovariances") {
  const auto g = var_autocovariance(VarPolynomial::scalar({0.5}),
                                    Eigen::MatrixXd::Constant(1, 1, 0.75), 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0](0, 0) == doctest::Approx(1.0));
  CHECK(g[1](0, 0) == doctest::Approx(0.5));
  CHECK(g[2](0, 0) == doctest::Approx(0.25));

  Eigen::MatrixXd s(2, 2);
  s << 1, 0.3, 0.3, 2;
  const auto z = var_autocovariance(VarPolynomial::zero(2), s, 2);
  CHECK((z[0] - s).norm() < 1e-14);
  CHECK(z[1].norm() < 1e-14);

  CHECK_THROWS_AS(var_autocovariance(VarPolynomial::scalar({1.1}), Eigen::MatrixXd::Ones(1, 1), 1),
                  InvalidArgument);
}

TEST_CASE("integrating the spectral density recovers Gamma(0) and Gamma(1)") {
  CounterRng rng(RngSeed{77});
  const Eigen::MatrixXd a1 = random_with_radius(3, 0.6, rng);
  const Eigen::MatrixXd a2 = 0.1 * random_with_radius(3, 0.5, rng);
  const VarPolynomial poly({a1, a2});
  REQUIRE(is_stable(poly).stable);
  const auto spec = ArmaSpec::var(poly, random_spd(3, rng));
  const auto gam = arma_autocovariance(spec, 1);

  const int n = 4096;
  Eigen::MatrixXcd g0 = Eigen::MatrixXcd::Zero(3, 3), g1 = Eigen::MatrixXcd::Zero(3, 3);
  for (const auto& f : spectrum_on_grid(spec, n)) {
    g0 += f.value;
    g1 += f.value * std::polar(1.0, f.theta);
  }
  g0 *= 2 * pi / n;
  g1 *= 2 * pi / n;
  CHECK((g0.real() - gam[0]).cwiseAbs().maxCoeff() < 1e-4);
  CHECK((g1.real() - gam[1]).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(g0.imag().cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("ARMA autocovariance of a scalar MA(1) and ARMA(1,1)") {
  const double b = 0.4, s2 = 2.0;
  const ArmaSpec ma(std::nullopt, VarPolynomial::scalar({b}), Eigen::MatrixXd::Constant(1, 1, s2));
  const auto g = arma_autocovariance(ma, 2);
  CHECK(g[0](0, 0) == doctest::Approx(s2 * (1 + b * b)));
  CHECK(g[1](0, 0) == doctest::Approx(-b * s2));
  CHECK(std::abs(g[2](0, 0)) < 1e-12);

  // X_t = a X_{t-1} + e_t - b e_{t-1}: gamma0 = s2 (1 - 2ab + b^2) / (1 - a^2)
  const double a = 0.6;
  const ArmaSpec arma(VarPolynomial::scalar({a}), VarPolynomial::scalar({b}),
                      Eigen::MatrixXd::Constant(1, 1, s2));
  const auto h = arma_autocovariance(arma, 2);
  const double g0 = s2 * (1 - 2 * a * b + b * b) / (1 - a * a);
  const double g1 = a * g0 - b * s2;
  CHECK(h[0](0, 0) == doctest::Approx(g0));
  CHECK(h[1](0, 0) == doctest::Approx(g1));
  CHECK(h[2](0, 0) == doctest::Approx(a * g1));
}

TEST_CASE("ARMA spectral bounds through mu extremes") {
  CounterRng rng(RngSeed{101});
  for (int rep = 0; rep < 10; ++rep) {
    const int p = 2 + rep % 2;
    const VarPolynomial ar({random_with_radius(p, 0.7, rng)});
    const VarPolynomial ma({random_with_radius(p, 0.5, rng)});
    const Eigen::MatrixXd s = random_spd(p, rng);
    const ArmaSpec spec(ar, ma, s);
    const auto r = stability_measures(spec, 1024);
    const auto mu_a = mu_extremes(ar, 1024);
    const auto mu_b = mu_extremes(ma, 1024);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(p - 1);
    CHECK(2 * pi * r.m_lower >= lmin * mu_b.min / mu_a.max - 1e-6);
    CHECK(2 * pi * r.m_upper <= lmax * mu_b.max / mu_a.min + 1e-6);
  }
}

TEST_CASE("block Toeplitz covariance") {
  std::vector<Eigen::MatrixXd> g{Eigen::MatrixXd::Constant(1, 1, 1.0),
                                 Eigen::MatrixXd::Constant(1, 1, 0.5),
                                 Eigen::MatrixXd::Constant(1, 1, 0.25)};
  Eigen::MatrixXd expect(3, 3);
  expect << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  CHECK((block_toeplitz_cov(g, 3) - expect).norm() < 1e-15);
  CHECK(block_toeplitz_cov(g, 1)(0, 0) == 1.0);

  Eigen::MatrixXd s(2, 2);
  s << 1, 0.2, 0.2, 1;
  std::vector<Eigen::MatrixXd> wn{s, Eigen::MatrixXd::Zero(2, 2)};
  const auto t = block_toeplitz_cov(wn, 2);
  CHECK(t.block(0, 0, 2, 2) == s);
  CHECK(t.block(2, 2, 2, 2) == s);
  CHECK(t.block(0, 2, 2, 2).norm() == 0.0);

  // Off-diagonal blocks: (r, s) holds Gamma(r - s), and Gamma(-h) = Gamma(h)'.
  Eigen::MatrixXd g1(2, 2);
  g1 << 0.1, 0.2, 0.3, 0.4;
  std::vector<Eigen::MatrixXd> asym{s, g1};
  const auto u = block_toeplitz_cov(asym, 2);
  CHECK(u.block(2, 0, 2, 2) == g1);
  CHECK(u.block(0, 2, 2, 2) == g1.transpose());
  CHECK_THROWS_AS(block_toeplitz_cov(asym, 3), InvalidArgument);
}
