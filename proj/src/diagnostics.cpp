#include "sparsets/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"
#include "sparsets/parallel.hpp"
#include "sparsets/stats.hpp"
#include "sparsets/var.hpp"

namespace sparsets {

namespace {

std::vector<int> random_support(int q, int k, CounterRng& rng) {
  std::vector<int> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(q - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

ReCertificate certify_re(const Gram& gram, double alpha, double tau, int trials, int sparsity,
                         const RngSeed& seed) {
  if (trials < 1) throw InvalidArgument("certify_re needs at least one trial");
  const int q = static_cast<int>(gram.size());
  const int k = std::clamp(sparsity, 1, q);
  CounterRng rng(seed);

  ReCertificate cert;
  cert.alpha = alpha;
  cert.tau = tau;
  cert.trials = trials;
  cert.min_value = std::numeric_limits<double>::infinity();

  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
    const auto supp = random_support(q, k, rng);
    if (t % 2 == 0) {
      for (int j : supp) theta(j) = rng.normal();
    } else {
      theta = rng.normal_vector(q);
      std::vector<bool> on(q, false);
      for (int j : supp) on[j] = true;
      double on_mass = 0.0, off_mass = 0.0;
      for (int j = 0; j < q; ++j) (on[j] ? on_mass : off_mass) += std::abs(theta(j));
      if (off_mass > 3.0 * on_mass && off_mass > 0.0) {
        const double scale = 3.0 * on_mass / off_mass;
        for (int j = 0; j < q; ++j)
          if (!on[j]) theta(j) *= scale;
      }
    }
    const double norm = theta.norm();
    if (norm == 0.0) continue;
    theta /= norm;
    const double l1 = theta.lpNorm<1>();
    const double value = theta.dot(gram.multiply(theta)) + tau * l1 * l1;
    if (value < cert.min_value) {
      cert.min_value = value;
      cert.worst_direction = theta;
    }
  }
  cert.violated = cert.min_value < alpha;
  return cert;
}

ReCertificate certify_re(const Eigen::MatrixXd& gram, double alpha, double tau, int trials,
                         int sparsity, const RngSeed& seed) {
  return certify_re(Gram::dense(gram), alpha, tau, trials, sparsity, seed);
}

DeviationReport deviation_mc(const ProcessSpec& spec, int n, const Eigen::VectorXd& v, double eta,
                             int replicates, const RngSeed& seed, int grid_size) {
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  if (n < 1 || replicates < 1) throw InvalidArgument("need n >= 1 and replicates >= 1");
  if (v.size() != spec.dim()) throw InvalidArgument("direction has the wrong dimension");
  const int k = static_cast<int>((v.array() != 0.0).count());
  if (k == 0) throw InvalidArgument("direction must be nonzero");

  const Eigen::MatrixXd gamma0 = arma_autocovariance(spec.arma(), 0)[0];
  const double target = v.dot(gamma0 * v);
  DeviationReport rep;
  rep.bound = 2.0 * std::numbers::pi * subprocess_stability(spec.arma(), k, grid_size).value * eta;
  rep.statistics.assign(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const Eigen::MatrixXd x = simulate(spec, n, seed.derive("rep", r));
    const Eigen::VectorXd xv = x * v;
    rep.statistics[r] = std::abs(xv.squaredNorm() / n - target);
  });
  const auto hits = std::count_if(rep.statistics.begin(), rep.statistics.end(),
                                  [&](double s) { return s > rep.bound; });
  rep.frequency = static_cast<double>(hits) / replicates;
  return rep;
}

CrossDeviationReport deviation_xe_mc(const ProcessSpec& x_spec, const ProcessSpec& noise_spec,
                                     int n, int replicates, const RngSeed& seed, int grid_size) {
  if (noise_spec.dim() != 1) throw InvalidArgument("noise process must be univariate");
  const int p = x_spec.dim();
  const double logp = std::log(static_cast<double>(std::max(p, 2)));
  if (n < static_cast<int>(std::ceil(logp))) throw InvalidArgument("need n >= log p");
  if (replicates < 1) throw InvalidArgument("need replicates >= 1");

  CrossDeviationReport rep;
  const double mx1 = subprocess_stability(x_spec.arma(), 1, grid_size).value;
  const double me = stability_measures(noise_spec.arma(), grid_size).m_upper;
  rep.rate = (mx1 + me) * std::sqrt(logp / n);
  rep.statistics.assign(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const auto rs = seed.derive("rep", r);
    const Eigen::MatrixXd x = simulate(x_spec, n, rs.derive("x"));
    const Eigen::MatrixXd e = simulate(noise_spec, n, rs.derive("eps"));
    rep.statistics[r] = (x.transpose() * e.col(0)).cwiseAbs().maxCoeff() / n;
  });
  rep.q95 = quantile(rep.statistics, 0.95);
  rep.ratio = rep.q95 / rep.rate;
  return rep;
}

SandwichReport toeplitz_sandwich_check(const ArmaSpec& spec, int n, int grid_size, double slack) {
  if (n < 1) throw InvalidArgument("sandwich check needs n >= 1");
  const auto stab = stability_measures(spec, grid_size);
  const auto gammas = arma_autocovariance(spec, n - 1);
  const Eigen::VectorXd ev = symmetric_eigenvalues(block_toeplitz_cov(gammas, n));

  SandwichReport rep;
  rep.n = n;
  rep.slack = slack;
  rep.lower = 2.0 * std::numbers::pi * stab.m_lower;
  rep.upper = 2.0 * std::numbers::pi * stab.m_upper;
  rep.eigen_min = ev(0);
  rep.eigen_max = ev(ev.size() - 1);
  if (rep.eigen_min < rep.lower - slack) {
    rep.violating_eigenvalue = rep.eigen_min;
  } else if (rep.eigen_max > rep.upper + slack) {
    rep.violating_eigenvalue = rep.eigen_max;
  }
  rep.passed = !rep.violating_eigenvalue.has_value();
  return rep;
}

RateAudit prop41_rate_audit(const VarInstance& instance, std::span<const int> ns, int replicates,
                            const RngSeed& seed, double lambda_constant, int grid_size) {
  if (replicates < 1) throw InvalidArgument("need replicates >= 1");
  const VarPolynomial& truth = instance.transition;
  const ProcessSpec spec(ArmaSpec::var(truth, instance.sigma_eps));
  const int p = truth.dim();
  const int d = truth.order();

  RateAudit audit;
  const Eigen::VectorXd beta_star = stack_coefficients(truth);
  audit.k = static_cast<int>((beta_star.array() != 0.0).count());
  const auto mu = mu_extremes(truth, grid_size);
  audit.mu_min_poly = mu.min;
  audit.mu_max_poly = mu.max;
  audit.mu_min_companion =
      mu_extremes(VarPolynomial(std::vector<Eigen::MatrixXd>{companion_matrix(truth)}), grid_size).min;
  audit.alpha = min_eigenvalue(instance.sigma_eps) / (2.0 * mu.max);

  for (int n : ns) {
    RateAuditRow row;
    row.n = n;
    row.l1_errors.assign(replicates, 0.0);
    row.l2_errors.assign(replicates, 0.0);
    row.prediction_errors.assign(replicates, 0.0);
    row.false_positive_counts.assign(replicates, 0.0);
    std::vector<double> lambdas(replicates, 0.0);
    parallel_for(replicates, [&](int r) {
      const Eigen::MatrixXd data = simulate(spec, n + d, seed.derive("N", n).derive("rep", r));
      const VarDesign des = build_design(data, d);
      const double lam = var_lambda_rule(des, lambda_constant);
      const auto prob = var_problem(des, Eigen::MatrixXd::Identity(p, p), lam);
      const auto fit = solve(prob);
      const Eigen::VectorXd delta = fit.beta_hat - beta_star;
      row.l1_errors[r] = delta.lpNorm<1>();
      row.l2_errors[r] = delta.norm();
      row.prediction_errors[r] = delta.dot(prob.gram.multiply(delta));
      const Eigen::VectorXd thr = threshold_estimate(fit.beta_hat, lam);
      double fp = 0.0;
      for (Eigen::Index j = 0; j < thr.size(); ++j) fp += (thr(j) != 0.0 && beta_star(j) == 0.0);
      row.false_positive_counts[r] = fp;
      lambdas[r] = lam;
    });
    row.lambda = lambdas.front();
    row.l1_error = median(row.l1_errors);
    row.l2_error = median(row.l2_errors);
    row.prediction_error = median(row.prediction_errors);
    row.false_positives = median(row.false_positive_counts);
    const double k = audit.k;
    row.l1_bound = 64.0 * k * row.lambda / audit.alpha;
    row.l2_bound = 16.0 * std::sqrt(k) * row.lambda / audit.alpha;
    row.prediction_bound = 128.0 * k * row.lambda * row.lambda / audit.alpha;
    audit.rows.push_back(std::move(row));
  }
  return audit;
}

}  // namespace sparsets
