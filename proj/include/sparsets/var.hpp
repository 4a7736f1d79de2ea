#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparsets/solver.hpp"
#include "sparsets/spectral.hpp"

namespace sparsets {

/// Lag-stacked regression form of a VAR(d) sample X^0..X^T:
/// response row r is X^{d+r}, predictor row r is [X^{d+r-1}', ..., X^{r}'].
struct VarDesign {
  Eigen::MatrixXd response;    // N x p
  Eigen::MatrixXd predictors;  // N x dp
  int n = 0;                   // N = T - d + 1
  int d = 1;
  int p = 1;
};

/// `data` holds T + 1 rows (time points 0..T) of a p-dimensional series.
VarDesign build_design(const Eigen::MatrixXd& data, int d);

enum class VarMethod { L1LS, L1LL, L1LLOracle, OLS, Ridge };

std::string to_string(VarMethod m);
VarMethod var_method_from_string(const std::string& name);

struct VarEstimate {
  VarPolynomial coeffs;
  VarMethod method = VarMethod::L1LS;
  double lambda = 0.0;
  std::optional<Eigen::MatrixXd> sigma_used;  // Sigma_eps whose inverse weighted the fit
  bool converged = true;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// vec(B) with B = [A_1'; ...; A_d'] (dp x p): entry (t-1)p + i of column j is A_t(j, i).
Eigen::VectorXd stack_coefficients(const VarPolynomial& poly);
VarPolynomial unstack_coefficients(const Eigen::VectorXd& beta, int p, int d);

/// Gram W (x) X'X/N and linear term vec(X' Y W)/N of the weighted problem.
QuadraticL1Problem var_problem(const VarDesign& design, const Eigen::MatrixXd& weight,
                               double lambda);

/// c sqrt((log d + 2 log p) / N).
double var_lambda_rule(const VarDesign& design, double constant = 1.0);

/// l1-penalized least squares: (1/N)||Y - Z b||^2 + lambda ||b||_1.
VarEstimate fit_l1_ls(const VarDesign& design, double lambda, const SolveOptions& opts = {});

/// l1-penalized Gaussian log-likelihood with residual weight sigma_eps^{-1}.
/// `method` tags the result (L1LL for a plug-in sigma, L1LLOracle for the truth).
VarEstimate fit_l1_ll(const VarDesign& design, double lambda, const Eigen::MatrixXd& sigma_eps,
                      const SolveOptions& opts = {}, VarMethod method = VarMethod::L1LL);

/// R'R / N for R = Y - X B-hat, symmetrized; ridged by delta I with
/// delta = 1e-6 max(trace / p, 1) when its smallest eigenvalue is below 1e-8.
Eigen::MatrixXd estimate_sigma_from_residuals(const VarDesign& design, const VarEstimate& estimate);

/// l1-LS fit -> residual covariance -> l1-LL refit at the same lambda.
VarEstimate fit_l1_ll_plugin(const VarDesign& design, double lambda,
                             const SolveOptions& opts = {});

VarEstimate fit_ols(const VarDesign& design);
VarEstimate fit_ridge(const VarDesign& design, double lambda);

/// Ridge with lambda picked from `grid` by one-step prediction error on the
/// last `holdout` fraction of rows, refit on all rows.
VarEstimate fit_ridge_tuned(const VarDesign& design,
                            std::span<const double> grid = {},
                            double holdout = 0.2);

/// Estimated coefficient vectors along a penalty path for one weighting.
struct VarPath {
  std::vector<double> lambdas;
  std::vector<Eigen::VectorXd> betas;
};
VarPath fit_path(const VarDesign& design, const Eigen::MatrixXd& weight,
                 std::span<const double> lambdas, const SolveOptions& opts = {});

/// Trapezoidal area under the ROC curve when coordinates are ranked by
/// `scores` (higher = more likely in the support). Tied scores share a
/// single ROC step. Throws if the truth is empty or full.
double auroc(std::span<const double> scores, const std::vector<bool>& truth);

/// Ranking score per coordinate along a path: the largest penalty at which it
/// is nonzero, ties broken by the magnitude at the end of the path.
std::vector<double> path_scores(const VarPath& path);

double auroc_from_path(const VarPath& path, const std::vector<bool>& truth);

/// ||A-hat - A||_F / ||A||_F over all lags.
double relative_error(const VarPolynomial& estimate, const VarPolynomial& truth);

/// sum_t A_t X^{now - t + 1}, where `recent` holds at least d rows in time
/// order (last row = now).
Eigen::VectorXd forecast_one_step(const VarPolynomial& coeffs, const Eigen::MatrixXd& recent);

std::vector<bool> support_of(const VarPolynomial& poly);

}  // namespace sparsets
