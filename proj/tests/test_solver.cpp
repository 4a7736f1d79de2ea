#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sparsets/error.hpp"
#include "sparsets/rng.hpp"
#include "sparsets/solver.hpp"

using namespace sparsets;

namespace {

Eigen::MatrixXd random_design(int n, int p, CounterRng& rng) {
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(1.0, 0.2) == doctest::Approx(0.8));
  CHECK(soft_threshold(-0.1, 0.2) == 0.0);
  CHECK(soft_threshold(-1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(soft_threshold(0.37, 0.0) == 0.37);
  CHECK_THROWS_AS(soft_threshold(1.0, -1.0), InvalidArgument);
}

TEST_CASE("Kronecker Gram agrees with the explicit product") {
  CounterRng rng(RngSeed{1});
  const Eigen::MatrixXd w0 = random_design(3, 3, rng), s0 = random_design(4, 4, rng);
  const Eigen::MatrixXd w = w0 * w0.transpose(), s = s0 * s0.transpose();
  const Eigen::MatrixXd full = Eigen::kroneckerProduct(w, s);
  const auto g = Gram::kronecker(w, s);
  CHECK(g.size() == 12);
  CHECK((g.to_dense() - full).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g(5, 7) == doctest::Approx(full(5, 7)));
  CHECK(g.diag(9) == doctest::Approx(full(9, 9)));

  const Eigen::VectorXd v = rng.normal_vector(12);
  CHECK((g.multiply(v) - full * v).norm() < 1e-10);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(12);
  g.add_column(6, 2.5, acc);
  CHECK((acc - 2.5 * full.col(6)).norm() < 1e-12);
  CHECK((g.scaled(3.0).to_dense() - 3.0 * full).norm() < 1e-10);
}

TEST_CASE("zero solution exactly when lambda reaches 2 ||linear||_inf") {
  CounterRng rng(RngSeed{2});
  const auto x = random_design(40, 6, rng);
  const Eigen::VectorXd y = rng.normal_vector(40);
  const Eigen::VectorXd g = x.transpose() * y / 40.0;
  const double top = lambda_max(g);
  CHECK(top == doctest::Approx(2 * g.cwiseAbs().maxCoeff()));
  const auto fit = lasso_regression(x, y, top);
  CHECK(fit.beta_hat.isZero(0.0));
  CHECK(fit.converged);
  const auto below = lasso_regression(x, y, 0.99 * top);
  CHECK_FALSE(below.beta_hat.isZero(0.0));
}

TEST_CASE("one-dimensional problem against a dense grid") {
  // minimize b^2 - 2b + 0.4|b|
  const QuadraticL1Problem prob(Gram::dense(Eigen::MatrixXd::Ones(1, 1)),
                                Eigen::VectorXd::Ones(1), 0.4);
  const auto fit = solve(prob);
  double best = 0, best_obj = std::numeric_limits<double>::infinity();
  for (int i = -200000; i <= 200000; ++i) {
    const double b = i * 1e-5;
    const double obj = b * b - 2 * b + 0.4 * std::abs(b);
    if (obj < best_obj) best_obj = obj, best = b;
  }
  CHECK(fit.beta_hat(0) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(std::abs(fit.beta_hat(0) - best) < 1e-5);
}

TEST_CASE("lambda = 0 solves the normal equations") {
  CounterRng rng(RngSeed{3});
  const auto a = random_design(5, 5, rng);
  const Eigen::MatrixXd g = a * a.transpose() + Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd lin = rng.normal_vector(5);
  const auto fit = solve(QuadraticL1Problem(Gram::dense(g), lin, 0.0), {}, {1e-12, 100000});
  CHECK((g * fit.beta_hat - lin).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("orthonormal design has a coordinatewise closed form") {
  CounterRng rng(RngSeed{4});
  const int n = 64, p = 8;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_design(n, p, rng));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  const Eigen::MatrixXd x = std::sqrt(double(n)) * q;
  REQUIRE((x.transpose() * x / n - Eigen::MatrixXd::Identity(p, p)).norm() < 1e-10);
  const Eigen::VectorXd y = rng.normal_vector(n);
  const double lam = 0.15;
  const Eigen::VectorXd c = x.transpose() * y / n;
  const auto fit = lasso_regression(x, y, lam);
  for (int j = 0; j < p; ++j)
    CHECK(fit.beta_hat(j) == doctest::Approx(soft_threshold(c(j), lam / 2)).epsilon(1e-8));
}

TEST_CASE("noiseless identifiable regression is recovered as lambda shrinks") {
  CounterRng rng(RngSeed{5});
  const auto x = random_design(80, 10, rng);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(10);
  beta(2) = 1.5;
  beta(7) = -0.7;
  const Eigen::VectorXd y = x * beta;
  const auto fit = lasso_regression(x, y, 1e-7, {1e-12, 100000});
  CHECK((fit.beta_hat - beta).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("two-dimensional toy against exhaustive grid minimization") {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.6, 0.6, 2.0;
  Eigen::VectorXd lin(2);
  lin << 0.9, -0.5;
  const double lam = 0.3;
  const QuadraticL1Problem prob(Gram::dense(g), lin, lam);
  const auto fit = solve(prob);
  double bx = 0, by = 0, best = std::numeric_limits<double>::infinity();
  for (int i = -2000; i <= 2000; ++i) {
    for (int j = -2000; j <= 2000; ++j) {
      const double a = i * 1e-3, b = j * 1e-3;
      const double obj = g(0, 0) * a * a + 2 * g(0, 1) * a * b + g(1, 1) * b * b -
                         2 * (a * lin(0) + b * lin(1)) + lam * (std::abs(a) + std::abs(b));
      if (obj < best) best = obj, bx = a, by = b;
    }
  }
  CHECK(std::abs(fit.beta_hat(0) - bx) <= 1e-3);
  CHECK(std::abs(fit.beta_hat(1) - by) <= 1e-3);
  CHECK(fit.objective <= best + 1e-12);
}

TEST_CASE("converged fits satisfy the subgradient conditions") {
  CounterRng rng(RngSeed{6});
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = random_design(50, 30, rng);
    const Eigen::VectorXd y = rng.normal_vector(50);
    const auto fit = lasso_regression(x, y, 0.05 + 0.02 * rep);
    REQUIRE(fit.converged);
    const Eigen::VectorXd lin = x.transpose() * y / 50.0;
    CHECK(fit.kkt_residual <= 1e-6 * std::max(1.0, lin.cwiseAbs().maxCoeff()));
    // independent recomputation of the conditions
    const Eigen::VectorXd grad = 2.0 * (x.transpose() * (x * fit.beta_hat - y) / 50.0);
    for (int j = 0; j < 30; ++j) {
      if (fit.beta_hat(j) == 0.0)
        CHECK(std::abs(grad(j)) <= fit.lambda + 1e-6);
      else
        CHECK(std::abs(grad(j) + fit.lambda * (fit.beta_hat(j) > 0 ? 1 : -1)) <= 1e-6);
    }
  }
}

TEST_CASE("sweep objectives never increase") {
  CounterRng rng(RngSeed{7});
  const auto x = random_design(30, 40, rng);
  const Eigen::VectorXd y = rng.normal_vector(30);
  SolveOptions opts;
  opts.record_objective = true;
  const auto fit = lasso_regression(x, y, 0.05, opts);
  REQUIRE(fit.sweep_objectives.size() == static_cast<std::size_t>(fit.iterations));
  for (std::size_t i = 1; i < fit.sweep_objectives.size(); ++i)
    CHECK(fit.sweep_objectives[i] <= fit.sweep_objectives[i - 1] + 1e-12);
}

TEST_CASE("lasso objective identity") {
  CounterRng rng(RngSeed{8});
  const auto x = random_design(25, 5, rng);
  const Eigen::VectorXd y = rng.normal_vector(25);
  const double lam = 0.2;
  const QuadraticL1Problem prob(Gram::dense(x.transpose() * x / 25.0), x.transpose() * y / 25.0,
                                lam);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::VectorXd b = rng.normal_vector(5);
    const double direct = (y - x * b).squaredNorm() / 25.0 + lam * b.lpNorm<1>();
    CHECK(direct == doctest::Approx(prob.objective(b) + y.squaredNorm() / 25.0).epsilon(1e-12));
  }
}

TEST_CASE("scaling the whole problem leaves the solution unchanged") {
  CounterRng rng(RngSeed{9});
  const auto x = random_design(40, 12, rng);
  const Eigen::VectorXd y = rng.normal_vector(40);
  const Gram g = Gram::dense(x.transpose() * x / 40.0);
  const Eigen::VectorXd lin = x.transpose() * y / 40.0;
  const SolveOptions tight{1e-12, 100000};
  const auto a = solve(QuadraticL1Problem(g, lin, 0.1), {}, tight);
  const auto b = solve(QuadraticL1Problem(g.scaled(3.5), 3.5 * lin, 0.35), {}, tight);
  CHECK((a.beta_hat - b.beta_hat).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Kronecker and dense Grams give the same fit") {
  CounterRng rng(RngSeed{10});
  const auto z = random_design(30, 4, rng);
  Eigen::MatrixXd w(2, 2);
  w << 2.0, -0.5, -0.5, 1.0;
  const Eigen::MatrixXd s = z.transpose() * z / 30.0;
  const Eigen::VectorXd lin = rng.normal_vector(8);
  const SolveOptions tight{1e-12, 100000};
  const auto k = solve(QuadraticL1Problem(Gram::kronecker(w, s), lin, 0.3), {}, tight);
  const auto d = solve(QuadraticL1Problem(Gram::dense(Eigen::kroneckerProduct(w, s)), lin, 0.3),
                       {}, tight);
  CHECK((k.beta_hat - d.beta_hat).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("zero curvature coordinates") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
  g(0, 0) = 1.0;
  Eigen::VectorXd lin(2);
  lin << 0.5, 0.01;
  CHECK(solve(QuadraticL1Problem(Gram::dense(g), lin, 0.1)).beta_hat(1) == 0.0);
  lin(1) = 1.0;
  CHECK_THROWS_AS(solve(QuadraticL1Problem(Gram::dense(g), lin, 0.1)), NumericalError);
}

TEST_CASE("hard thresholding of estimates") {
  Eigen::VectorXd b(2);
  b << 0.5, 0.05;
  const auto t = threshold_estimate(b, 0.1);
  CHECK(t(0) == 0.5);
  CHECK(t(1) == 0.0);
  CHECK(threshold_estimate(b, 0.0) == b);
  CHECK(threshold_estimate(b, 1.0).isZero(0.0));
}

TEST_CASE("penalty paths") {
  CounterRng rng(RngSeed{11});
  const auto x = random_design(30, 8, rng);
  const Eigen::VectorXd y = rng.normal_vector(30);
  const Eigen::VectorXd lin = x.transpose() * y / 30.0;
  const auto grid = log_lambda_grid(lambda_max(lin), 0.01, 20);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(lambda_max(lin)));
  CHECK(grid.back() == doctest::Approx(0.01 * lambda_max(lin)));
  CHECK(grid[1] / grid[0] == doctest::Approx(grid[2] / grid[1]));

  const auto path = lasso_path(x, y, grid);
  CHECK(path.front().beta_hat.isZero(0.0));
  for (std::size_t i = 0; i < path.size(); i += 7) {
    const auto single = lasso_regression(x, y, grid[i]);
    CHECK((single.beta_hat - path[i].beta_hat).cwiseAbs().maxCoeff() < 1e-6);
  }
  const std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS(lasso_path(x, y, bad), InvalidArgument);
}

TEST_CASE("lambda rule") {
  CHECK(LambdaRule{2.0, 100, 50.0}.value() == doctest::Approx(2.0 * std::sqrt(std::log(50.0) / 100)));
  CHECK(LambdaRule{1.0, 400, 50.0}.value() * 2 == doctest::Approx(LambdaRule{1.0, 100, 50.0}.value()));
  const LambdaRule bad{1.0, 0, 50.0};
  CHECK_THROWS_AS(bad.value(), InvalidArgument);
}
