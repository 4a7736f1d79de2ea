#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sparsets/processes.hpp"
#include "sparsets/rng.hpp"
#include "sparsets/solver.hpp"
#include "sparsets/spectral.hpp"

namespace sparsets {

/// Outcome of a randomized restricted-eigenvalue check.
///
/// The check is one-sided: sampled directions can expose a violation of
/// theta' G theta >= alpha ||theta||^2 - tau ||theta||_1^2, but never prove
/// that the inequality holds for all theta (exact verification is NP-hard).
/// `violated == false` only means no sampled direction broke it.
struct ReCertificate {
  double alpha = 0.0;
  double tau = 0.0;
  bool violated = false;
  double min_value = 0.0;  // min over samples of theta' G theta + tau ||theta||_1^2
  Eigen::VectorXd worst_direction;  // unit norm
  int trials = 0;
};

/// Half of the trials draw unit directions on random k-sparse supports, the
/// other half draw from cones C(J, 3) (off-support l1 mass clipped to three
/// times the on-support mass).
ReCertificate certify_re(const Gram& gram, double alpha, double tau, int trials, int sparsity,
                         const RngSeed& seed);
ReCertificate certify_re(const Eigen::MatrixXd& gram, double alpha, double tau, int trials,
                         int sparsity, const RngSeed& seed);

struct DeviationReport {
  double bound = 0.0;      // 2 pi M(f, k) eta
  double frequency = 0.0;  // share of replicates with statistic > bound
  std::vector<double> statistics;  // |v'(S - Gamma(0)) v| per replicate
};

/// Monte Carlo exceedance of |v'(S - Gamma(0)) v| over 2 pi M(f, k) eta,
/// where S = X'X / n (uncentered) and k = |supp(v)|.
DeviationReport deviation_mc(const ProcessSpec& spec, int n, const Eigen::VectorXd& v, double eta,
                             int replicates, const RngSeed& seed, int grid_size = 2048);

struct CrossDeviationReport {
  double q95 = 0.0;          // 95th percentile of ||X'E/n||_inf
  double rate = 0.0;         // [M(f_X, 1) + M(f_eps)] sqrt(log p / n)
  double ratio = 0.0;        // q95 / rate
  std::vector<double> statistics;
};

/// Monte Carlo distribution of ||X'E/n||_inf for independent predictor and
/// univariate noise processes.
CrossDeviationReport deviation_xe_mc(const ProcessSpec& x_spec, const ProcessSpec& noise_spec,
                                     int n, int replicates, const RngSeed& seed,
                                     int grid_size = 2048);

struct SandwichReport {
  int n = 0;
  double lower = 0.0;  // 2 pi m(f)
  double upper = 0.0;  // 2 pi M(f)
  double eigen_min = 0.0;
  double eigen_max = 0.0;
  double slack = 0.0;
  bool passed = false;
  std::optional<double> violating_eigenvalue;
};

/// Eigenvalues of the np x np block-Toeplitz covariance against
/// [2 pi m(f) - slack, 2 pi M(f) + slack].
SandwichReport toeplitz_sandwich_check(const ArmaSpec& spec, int n, int grid_size = 8192,
                                       double slack = 1e-4);

/// Known VAR instance for rate audits.
struct VarInstance {
  VarPolynomial transition;
  Eigen::MatrixXd sigma_eps;
};

struct RateAuditRow {
  int n = 0;  // N, effective sample size
  double lambda = 0.0;
  double l1_error = 0.0;  // medians over replicates
  double l2_error = 0.0;
  double prediction_error = 0.0;
  double false_positives = 0.0;  // thresholded at lambda
  double l1_bound = 0.0;         // 64 k lambda / alpha
  double l2_bound = 0.0;         // 16 sqrt(k) lambda / alpha
  double prediction_bound = 0.0; // 128 k lambda^2 / alpha
  std::vector<double> l2_errors;
  std::vector<double> l1_errors;
  std::vector<double> prediction_errors;
  std::vector<double> false_positive_counts;
};

struct RateAudit {
  int k = 0;
  double alpha = 0.0;                // Lambda_min(Sigma) / (2 mu_max(A))
  double mu_min_poly = 0.0;          // mu_min(A)
  double mu_max_poly = 0.0;
  double mu_min_companion = 0.0;     // mu_min of I - A~ z
  std::vector<RateAuditRow> rows;
};

/// l1-LS errors at lambda_N = c sqrt((log d + 2 log p) / N) for each N in
/// `ns`, next to the deterministic error-bound forms. Only rates are meant to
/// be compared; the bound constants assume unit deviation constants.
RateAudit prop41_rate_audit(const VarInstance& instance, std::span<const int> ns, int replicates,
                            const RngSeed& seed, double lambda_constant = 1.0,
                            int grid_size = 2048);

}  // namespace sparsets
