#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace sparsets {

/// Symmetric PSD matrix for the quadratic term: either stored densely or as
/// the Kronecker product W (x) S, which is never materialized.
class Gram {
 public:
  static Gram dense(Eigen::MatrixXd g);
  static Gram kronecker(Eigen::MatrixXd w, Eigen::MatrixXd s);

  Eigen::Index size() const { return size_; }
  bool is_kronecker() const { return kron_; }
  double diag(Eigen::Index j) const;
  double operator()(Eigen::Index i, Eigen::Index j) const;
  /// out += scale * column j
  void add_column(Eigen::Index j, double scale, Eigen::VectorXd& out) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd to_dense() const;
  Gram scaled(double c) const;

  const Eigen::MatrixXd& dense_matrix() const { return a_; }  // dense form, or W
  const Eigen::MatrixXd& kron_right() const { return s_; }    // S of W (x) S

 private:
  Gram() = default;
  bool kron_ = false;
  Eigen::Index size_ = 0;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd s_;
};

/// minimize  b' G b - 2 b' g + lambda ||b||_1.
/// Stationarity reads 2 (G b - g)_j + lambda sign(b_j) = 0, so every
/// coordinate update shrinks by lambda / 2. This convention is used
/// throughout the library: lambda always multiplies ||b||_1 in an objective
/// whose quadratic part is (1/n)||y - X b||^2.
struct QuadraticL1Problem {
  QuadraticL1Problem(Gram gram, Eigen::VectorXd linear, double lambda);

  Gram gram;
  Eigen::VectorXd linear;
  double lambda;

  double objective(const Eigen::VectorXd& beta) const;
  /// Largest violation of the subgradient optimality conditions.
  double kkt_residual(const Eigen::VectorXd& beta) const;
};

struct L1Fit {
  Eigen::VectorXd beta_hat;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  double lambda = 0.0;
  std::vector<double> sweep_objectives;  // filled when requested
};

struct SolveOptions {
  double tol = 1e-8;       // max coordinate change per sweep
  int max_iter = 10000;    // sweeps
  double kkt_tol = 1e-6;   // relative to max(1, ||linear||_inf)
  bool record_objective = false;
};

double soft_threshold(double x, double t);

/// Cyclic coordinate descent, warm-started at `init` (empty = zeros).
/// Throws NumericalError if a coordinate with zero curvature would become
/// active. A fit that runs out of sweeps comes back with converged = false.
L1Fit solve(const QuadraticL1Problem& prob, const Eigen::VectorXd& init = {},
            const SolveOptions& opts = {});

/// Warm-started solves along a strictly descending list of penalties.
std::vector<L1Fit> solve_path(const Gram& gram, const Eigen::VectorXd& linear,
                              std::span<const double> lambdas, const SolveOptions& opts = {});

/// Lasso on (1/n)||y - X b||^2 + lambda ||b||_1.
L1Fit lasso_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                       const SolveOptions& opts = {});

std::vector<L1Fit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              std::span<const double> lambdas, const SolveOptions& opts = {});

/// Zeroes entries with |b_j| <= level.
Eigen::VectorXd threshold_estimate(const Eigen::VectorXd& beta, double level);
inline Eigen::VectorXd threshold_estimate(const L1Fit& fit, double level) {
  return threshold_estimate(fit.beta_hat, level);
}

/// Smallest penalty whose solution is exactly zero: 2 ||linear||_inf.
double lambda_max(const Eigen::VectorXd& linear);

/// `count` log-spaced penalties from `top` down to top * ratio.
std::vector<double> log_lambda_grid(double top, double ratio = 0.01, int count = 50);

/// lambda = c sqrt(log(p_eff) / n).
struct LambdaRule {
  double constant = 1.0;
  int n = 1;
  double p_eff = 2.0;

  double value() const;
};

}  // namespace sparsets
