#include "sparsets/var.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/Cholesky>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

namespace sparsets {

VarDesign build_design(const Eigen::MatrixXd& data, int d) {
  if (d < 1) throw InvalidArgument("lag order d must be >= 1");
  const int t_last = static_cast<int>(data.rows()) - 1;  // T
  if (t_last < d) throw InvalidArgument("need T >= d (at least d + 1 observations)");
  const int p = static_cast<int>(data.cols());
  VarDesign des;
  des.d = d;
  des.p = p;
  des.n = t_last - d + 1;
  des.response = data.bottomRows(des.n);
  des.predictors.resize(des.n, d * p);
  for (int r = 0; r < des.n; ++r) {
    const int t = d + r;
    for (int lag = 1; lag <= d; ++lag) {
      des.predictors.block(r, (lag - 1) * p, 1, p) = data.row(t - lag);
    }
  }
  return des;
}

std::string to_string(VarMethod m) {
  switch (m) {
    case VarMethod::L1LS: return "l1ls";
    case VarMethod::L1LL: return "l1ll";
    case VarMethod::L1LLOracle: return "l1ll-oracle";
    case VarMethod::OLS: return "ols";
    case VarMethod::Ridge: return "ridge";
  }
  return "l1ls";
}

VarMethod var_method_from_string(const std::string& name) {
  if (name == "l1ls") return VarMethod::L1LS;
  if (name == "l1ll") return VarMethod::L1LL;
  if (name == "l1ll-oracle") return VarMethod::L1LLOracle;
  if (name == "ols") return VarMethod::OLS;
  if (name == "ridge") return VarMethod::Ridge;
  throw InvalidArgument("unknown method '" + name + "'");
}

Eigen::VectorXd stack_coefficients(const VarPolynomial& poly) {
  const int p = poly.dim();
  const int d = poly.order();
  const int m = d * p;
  Eigen::VectorXd beta(m * p);
  for (int j = 0; j < p; ++j)
    for (int t = 1; t <= d; ++t)
      for (int i = 0; i < p; ++i) beta(j * m + (t - 1) * p + i) = poly.coeff(t)(j, i);
  return beta;
}

VarPolynomial unstack_coefficients(const Eigen::VectorXd& beta, int p, int d) {
  const int m = d * p;
  if (beta.size() != static_cast<Eigen::Index>(m) * p) {
    throw InvalidArgument("coefficient vector length must be d p^2");
  }
  std::vector<Eigen::MatrixXd> a(d, Eigen::MatrixXd::Zero(p, p));
  for (int j = 0; j < p; ++j)
    for (int t = 1; t <= d; ++t)
      for (int i = 0; i < p; ++i) a[t - 1](j, i) = beta(j * m + (t - 1) * p + i);
  return VarPolynomial(std::move(a));
}

QuadraticL1Problem var_problem(const VarDesign& design, const Eigen::MatrixXd& weight,
                               double lambda) {
  if (weight.rows() != design.p || weight.cols() != design.p) {
    throw InvalidArgument("weight matrix must be p x p");
  }
  const double n = design.n;
  Eigen::MatrixXd s = design.predictors.transpose() * design.predictors / n;
  const Eigen::MatrixXd xy = design.predictors.transpose() * design.response * weight / n;
  Eigen::VectorXd lin = Eigen::Map<const Eigen::VectorXd>(xy.data(), xy.size());
  return QuadraticL1Problem(Gram::kronecker(weight, std::move(s)), std::move(lin), lambda);
}

double var_lambda_rule(const VarDesign& design, double constant) {
  const double num = std::log(static_cast<double>(design.d)) + 2.0 * std::log(static_cast<double>(design.p));
  // p = d = 1 leaves log terms at zero; fall back to log 2 so lambda stays positive
  return constant * std::sqrt(std::max(num, std::log(2.0)) / design.n);
}

namespace {

VarEstimate estimate_from_fit(const VarDesign& design, const L1Fit& fit, VarMethod method) {
  return VarEstimate{unstack_coefficients(fit.beta_hat, design.p, design.d), method, fit.lambda,
                     std::nullopt, fit.converged, fit.kkt_residual, fit.iterations};
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw InvalidArgument("sigma_eps must be square");
  if (!is_symmetric(s, 1e-8)) throw InvalidArgument("sigma_eps must be symmetric");
  Eigen::MatrixXd inv = solve_spd(s, Eigen::MatrixXd::Identity(s.rows(), s.cols()));
  return 0.5 * (inv + inv.transpose());
}

Eigen::MatrixXd coefficients_block(const VarDesign& design, const VarPolynomial& poly) {
  // B = [A_1'; ...; A_d'], dp x p
  Eigen::MatrixXd b(design.d * design.p, design.p);
  for (int t = 1; t <= design.d; ++t) b.middleRows((t - 1) * design.p, design.p) = poly.coeff(t).transpose();
  return b;
}

}  // namespace

VarEstimate fit_l1_ls(const VarDesign& design, double lambda, const SolveOptions& opts) {
  const auto prob = var_problem(design, Eigen::MatrixXd::Identity(design.p, design.p), lambda);
  return estimate_from_fit(design, solve(prob, {}, opts), VarMethod::L1LS);
}

VarEstimate fit_l1_ll(const VarDesign& design, double lambda, const Eigen::MatrixXd& sigma_eps,
                      const SolveOptions& opts, VarMethod method) {
  if (sigma_eps.rows() != design.p) throw InvalidArgument("sigma_eps must be p x p");
  const auto prob = var_problem(design, inverse_spd(sigma_eps), lambda);
  VarEstimate est = estimate_from_fit(design, solve(prob, {}, opts), method);
  est.sigma_used = sigma_eps;
  return est;
}

Eigen::MatrixXd estimate_sigma_from_residuals(const VarDesign& design, const VarEstimate& estimate) {
  if (estimate.coeffs.dim() != design.p || estimate.coeffs.order() != design.d) {
    throw InvalidArgument("estimate does not match the design");
  }
  const Eigen::MatrixXd resid =
      design.response - design.predictors * coefficients_block(design, estimate.coeffs);
  Eigen::MatrixXd s = resid.transpose() * resid / static_cast<double>(design.n);
  s = 0.5 * (s + s.transpose());
  if (min_eigenvalue(s) < 1e-8) {
    const double delta = 1e-6 * std::max(s.trace() / design.p, 1.0);
    s.diagonal().array() += delta;
  }
  return s;
}

VarEstimate fit_l1_ll_plugin(const VarDesign& design, double lambda, const SolveOptions& opts) {
  const VarEstimate ls = fit_l1_ls(design, lambda, opts);
  return fit_l1_ll(design, lambda, estimate_sigma_from_residuals(design, ls), opts, VarMethod::L1LL);
}

VarEstimate fit_ols(const VarDesign& design) {
  const Eigen::MatrixXd xtx = design.predictors.transpose() * design.predictors;
  const Eigen::MatrixXd xty = design.predictors.transpose() * design.response;
  const Eigen::MatrixXd b = solve_spd(xtx, xty);  // dp x p
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  return VarEstimate{unstack_coefficients(beta, design.p, design.d), VarMethod::OLS, 0.0,
                     std::nullopt, true, 0.0, 0};
}

VarEstimate fit_ridge(const VarDesign& design, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("ridge penalty must be positive");
  const double n = design.n;
  Eigen::MatrixXd g = design.predictors.transpose() * design.predictors / n;
  g.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = design.predictors.transpose() * design.response / n;
  const Eigen::MatrixXd b = g.llt().solve(rhs);
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  return VarEstimate{unstack_coefficients(beta, design.p, design.d), VarMethod::Ridge, lambda,
                     std::nullopt, true, 0.0, 0};
}

VarEstimate fit_ridge_tuned(const VarDesign& design, std::span<const double> grid, double holdout) {
  static constexpr double kDefaultGrid[] = {1e-2, 1e-1, 1.0, 1e1, 1e2};
  if (grid.empty()) grid = kDefaultGrid;
  if (!(holdout > 0.0 && holdout < 1.0)) throw InvalidArgument("holdout fraction must lie in (0, 1)");
  const int test = std::max(1, static_cast<int>(std::round(holdout * design.n)));
  const int train = design.n - test;
  if (train < 1) throw InvalidArgument("design too short to hold out a validation block");

  VarDesign head = design;
  head.n = train;
  head.response = design.response.topRows(train);
  head.predictors = design.predictors.topRows(train);
  const Eigen::MatrixXd tx = design.predictors.bottomRows(test);
  const Eigen::MatrixXd ty = design.response.bottomRows(test);

  double best_lambda = grid[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double lam : grid) {
    const auto est = fit_ridge(head, lam);
    const double err = (ty - tx * coefficients_block(head, est.coeffs)).squaredNorm();
    if (err < best_err) {
      best_err = err;
      best_lambda = lam;
    }
  }
  return fit_ridge(design, best_lambda);
}

VarPath fit_path(const VarDesign& design, const Eigen::MatrixXd& weight,
                 std::span<const double> lambdas, const SolveOptions& opts) {
  const auto prob = var_problem(design, weight, lambdas.empty() ? 0.0 : lambdas[0]);
  const auto fits = solve_path(prob.gram, prob.linear, lambdas, opts);
  VarPath path;
  path.lambdas.assign(lambdas.begin(), lambdas.end());
  for (const auto& f : fits) path.betas.push_back(f.beta_hat);
  return path;
}

double auroc(std::span<const double> scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) throw InvalidArgument("scores and truth differ in length");
  const auto pos = std::count(truth.begin(), truth.end(), true);
  const auto neg = static_cast<std::ptrdiff_t>(truth.size()) - pos;
  if (pos == 0 || neg == 0) throw InvalidArgument("AUROC needs a nonempty, non-full true support");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0;
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    double dtp = 0.0, dfp = 0.0;
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (truth[order[j]] ? dtp : dfp) += 1.0;
      ++j;
    }
    // trapezoid between (fp, tp) and (fp + dfp, tp + dtp)
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return area / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<double> path_scores(const VarPath& path) {
  if (path.betas.empty()) throw InvalidArgument("empty path");
  const auto q = path.betas.front().size();
  std::vector<std::pair<double, double>> key(q, {0.0, 0.0});
  for (Eigen::Index j = 0; j < q; ++j) {
    for (std::size_t l = 0; l < path.betas.size(); ++l) {
      if (path.betas[l](j) != 0.0) {
        key[j].first = path.lambdas[l];
        break;
      }
    }
    key[j].second = std::abs(path.betas.back()(j));
  }
  // dense ranks of the lexicographic key
  std::vector<std::pair<double, double>> sorted = key;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    out[j] = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), key[j]) - sorted.begin());
  }
  return out;
}

double auroc_from_path(const VarPath& path, const std::vector<bool>& truth) {
  const auto s = path_scores(path);
  return auroc(s, truth);
}

double relative_error(const VarPolynomial& estimate, const VarPolynomial& truth) {
  if (estimate.dim() != truth.dim() || estimate.order() != truth.order()) {
    throw InvalidArgument("estimate and truth dimensions differ");
  }
  double num = 0.0, den = 0.0;
  for (int t = 1; t <= truth.order(); ++t) {
    num += (estimate.coeff(t) - truth.coeff(t)).squaredNorm();
    den += truth.coeff(t).squaredNorm();
  }
  if (den == 0.0) throw InvalidArgument("relative error is undefined for a zero truth");
  return std::sqrt(num / den);
}

Eigen::VectorXd forecast_one_step(const VarPolynomial& coeffs, const Eigen::MatrixXd& recent) {
  const int d = coeffs.order();
  if (recent.rows() < d) throw InvalidArgument("forecast needs at least d rows of history");
  if (recent.cols() != coeffs.dim()) throw InvalidArgument("history has the wrong dimension");
  const auto last = recent.rows() - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.dim());
  for (int t = 1; t <= d; ++t) out += coeffs.coeff(t) * recent.row(last - t + 1).transpose();
  return out;
}

std::vector<bool> support_of(const VarPolynomial& poly) {
  const Eigen::VectorXd beta = stack_coefficients(poly);
  std::vector<bool> s(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) s[j] = beta(j) != 0.0;
  return s;
}

}  // namespace sparsets
