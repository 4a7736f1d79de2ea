#include "sparsets/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

namespace sparsets {

// ---------------------------------------------------------------------------
// Gram

Gram Gram::dense(Eigen::MatrixXd g) {
  if (g.rows() != g.cols()) throw InvalidArgument("Gram matrix must be square");
  Gram out;
  out.size_ = g.rows();
  out.a_ = std::move(g);
  return out;
}

Gram Gram::kronecker(Eigen::MatrixXd w, Eigen::MatrixXd s) {
  if (w.rows() != w.cols() || s.rows() != s.cols()) {
    throw InvalidArgument("Kronecker Gram factors must be square");
  }
  Gram out;
  out.kron_ = true;
  out.size_ = w.rows() * s.rows();
  out.a_ = std::move(w);
  out.s_ = std::move(s);
  return out;
}

double Gram::diag(Eigen::Index j) const {
  if (!kron_) return a_(j, j);
  const auto m = s_.rows();
  return a_(j / m, j / m) * s_(j % m, j % m);
}

double Gram::operator()(Eigen::Index i, Eigen::Index j) const {
  if (!kron_) return a_(i, j);
  const auto m = s_.rows();
  return a_(i / m, j / m) * s_(i % m, j % m);
}

void Gram::add_column(Eigen::Index j, double scale, Eigen::VectorXd& out) const {
  if (!kron_) {
    out.noalias() += scale * a_.col(j);
    return;
  }
  const auto m = s_.rows();
  const auto blk = j / m;
  const auto within = j % m;
  for (Eigen::Index c = 0; c < a_.rows(); ++c) {
    const double w = a_(c, blk);
    if (w != 0.0) out.segment(c * m, m).noalias() += (scale * w) * s_.col(within);
  }
}

Eigen::VectorXd Gram::multiply(const Eigen::VectorXd& v) const {
  if (!kron_) return a_ * v;
  const auto m = s_.rows();
  const auto p = a_.rows();
  const Eigen::Map<const Eigen::MatrixXd> b(v.data(), m, p);
  // (W (x) S) vec(B) = vec(S B W')
  const Eigen::MatrixXd r = s_ * b * a_.transpose();
  return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
}

Eigen::MatrixXd Gram::to_dense() const {
  if (!kron_) return a_;
  const auto m = s_.rows();
  const auto p = a_.rows();
  Eigen::MatrixXd out(size_, size_);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) out.block(i * m, j * m, m, m) = a_(i, j) * s_;
  return out;
}

Gram Gram::scaled(double c) const {
  Gram out = *this;
  out.a_ *= c;
  return out;
}

// ---------------------------------------------------------------------------
// Problem

QuadraticL1Problem::QuadraticL1Problem(Gram g, Eigen::VectorXd lin, double lam)
    : gram(std::move(g)), linear(std::move(lin)), lambda(lam) {
  if (linear.size() != gram.size()) throw InvalidArgument("linear term length must match the Gram");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  const bool sym = gram.is_kronecker()
                       ? is_symmetric(gram.dense_matrix(), 1e-10) && is_symmetric(gram.kron_right(), 1e-10)
                       : is_symmetric(gram.dense_matrix(), 1e-10);
  if (!sym) throw InvalidArgument("Gram matrix must be symmetric");
}

double QuadraticL1Problem::objective(const Eigen::VectorXd& beta) const {
  return beta.dot(gram.multiply(beta)) - 2.0 * beta.dot(linear) + lambda * beta.lpNorm<1>();
}

namespace {

double kkt_from_gradient(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad, double lambda) {
  // grad = 2 (G b - g)
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                    : std::abs(grad(j) + lambda * (beta(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

double QuadraticL1Problem::kkt_residual(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd grad = 2.0 * (gram.multiply(beta) - linear);
  return kkt_from_gradient(beta, grad, lambda);
}

// ---------------------------------------------------------------------------
// Coordinate descent

double soft_threshold(double x, double t) {
  if (t < 0.0) throw InvalidArgument("soft_threshold needs t >= 0");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

L1Fit solve(const QuadraticL1Problem& prob, const Eigen::VectorXd& init, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const Eigen::Index q = prob.gram.size();
  L1Fit fit;
  fit.lambda = prob.lambda;
  fit.beta_hat = init.size() == 0 ? Eigen::VectorXd::Zero(q) : init;
  if (fit.beta_hat.size() != q) throw InvalidArgument("initial point has the wrong length");

  Eigen::VectorXd& beta = fit.beta_hat;
  const double half_lambda = 0.5 * prob.lambda;
  const double kkt_limit = opts.kkt_tol * std::max(1.0, prob.linear.cwiseAbs().maxCoeff());
  // r = G b - g, kept current across coordinate moves
  Eigen::VectorXd r = prob.gram.multiply(beta) - prob.linear;

  auto current_objective = [&] {
    return beta.dot(r) - beta.dot(prob.linear) + prob.lambda * beta.lpNorm<1>();
  };

  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      const double gjj = prob.gram.diag(j);
      const double old = beta(j);
      const double z = gjj * old - r(j);  // g_j - sum_{k != j} G_jk b_k
      double next;
      if (gjj > 0.0) {
        next = soft_threshold(z, half_lambda) / gjj;
      } else {
        if (soft_threshold(z, half_lambda) != 0.0) {
          std::ostringstream os;
          os << "coordinate " << j << " has zero curvature but a nonzero update";
          throw NumericalError(os.str());
        }
        next = 0.0;
      }
      const double delta = next - old;
      if (delta != 0.0) {
        beta(j) = next;
        prob.gram.add_column(j, delta, r);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    fit.iterations = sweep;
    if (opts.record_objective) fit.sweep_objectives.push_back(current_objective());
    if (max_change <= opts.tol) {
      r = prob.gram.multiply(beta) - prob.linear;  // drop accumulated drift
      fit.kkt_residual = kkt_from_gradient(beta, 2.0 * r, prob.lambda);
      if (fit.kkt_residual <= kkt_limit) {
        fit.converged = true;
        break;
      }
    }
  }
  if (!fit.converged) {
    fit.kkt_residual = prob.kkt_residual(beta);
  }
  fit.objective = prob.objective(beta);
  return fit;
}

std::vector<L1Fit> solve_path(const Gram& gram, const Eigen::VectorXd& linear,
                              std::span<const double> lambdas, const SolveOptions& opts) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidArgument("path penalties must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw InvalidArgument("path penalties must be strictly descending");
    }
  }
  std::vector<L1Fit> out;
  out.reserve(lambdas.size());
  QuadraticL1Problem prob(gram, linear, lambdas.empty() ? 0.0 : lambdas[0]);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(gram.size());
  for (double lam : lambdas) {
    prob.lambda = lam;
    out.push_back(solve(prob, warm, opts));
    warm = out.back().beta_hat;
  }
  return out;
}

namespace {

void check_regression_shapes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() < 1 || x.cols() < 1) throw InvalidArgument("design must have n, p >= 1");
  if (y.size() != x.rows()) throw InvalidArgument("response length must equal the number of rows");
}

}  // namespace

L1Fit lasso_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                       const SolveOptions& opts) {
  check_regression_shapes(x, y);
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd g = x.transpose() * x / n;
  Eigen::VectorXd lin = x.transpose() * y / n;
  return solve(QuadraticL1Problem(Gram::dense(std::move(g)), std::move(lin), lambda), {}, opts);
}

std::vector<L1Fit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              std::span<const double> lambdas, const SolveOptions& opts) {
  check_regression_shapes(x, y);
  const double n = static_cast<double>(x.rows());
  return solve_path(Gram::dense(x.transpose() * x / n), x.transpose() * y / n, lambdas, opts);
}

Eigen::VectorXd threshold_estimate(const Eigen::VectorXd& beta, double level) {
  if (!(level >= 0.0)) throw InvalidArgument("threshold level must be >= 0");
  Eigen::VectorXd out = beta;
  for (Eigen::Index j = 0; j < out.size(); ++j)
    if (std::abs(out(j)) <= level) out(j) = 0.0;
  return out;
}

double lambda_max(const Eigen::VectorXd& linear) {
  return linear.size() ? 2.0 * linear.cwiseAbs().maxCoeff() : 0.0;
}

std::vector<double> log_lambda_grid(double top, double ratio, int count) {
  if (!(top > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 1) {
    throw InvalidArgument("log_lambda_grid needs top > 0, ratio in (0, 1), count >= 1");
  }
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[i] = top * std::pow(ratio, frac);
  }
  return out;
}

double LambdaRule::value() const {
  if (!(constant > 0.0) || n < 1 || !(p_eff > 1.0)) {
    throw InvalidArgument("lambda rule needs c > 0, n >= 1 and an effective dimension > 1");
  }
  return constant * std::sqrt(std::log(p_eff) / n);
}

}  // namespace sparsets
