#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "sparsets/rng.hpp"
#include "sparsets/spectral.hpp"

namespace sparsets {

inline constexpr int kDefaultBurnIn = 500;

enum class ProcessKind { Var, Arma };

/// A simulable stationary Gaussian process. Construction rejects unstable AR
/// parts and non-invertible MA parts.
class ProcessSpec {
 public:
  explicit ProcessSpec(ArmaSpec arma, int burn_in = kDefaultBurnIn);

  const ArmaSpec& arma() const { return arma_; }
  int burn_in() const { return burn_in_; }
  int dim() const { return arma_.dim(); }
  ProcessKind kind() const { return arma_.ma() ? ProcessKind::Arma : ProcessKind::Var; }

 private:
  ArmaSpec arma_;
  int burn_in_;
};

enum class CovFamily { BlockI, BlockII, Toeplitz, Identity };

struct ErrorCovFamily {
  CovFamily family = CovFamily::Identity;
  double rho = 0.0;
  int p = 1;
};

std::string to_string(CovFamily f);
CovFamily cov_family_from_string(const std::string& name);

/// T x p sample path (rows are time points) of the recursion
/// X_t = sum A_i X_{t-i} + eps_t - sum B_j eps_{t-j}, started from zero and
/// run for burn_in extra steps that are discarded.
Eigen::MatrixXd simulate(const ProcessSpec& spec, int T, const RngSeed& seed);

/// Block-I, Block-II, Toeplitz or identity error covariance with unit
/// diagonal. Block families need even p. Throws NumericalError if the result
/// is not positive definite.
Eigen::MatrixXd build_error_cov(const ErrorCovFamily& fam);

/// sqrt(trace Gamma_X(0) / trace Sigma) for X_t = A X_{t-1} + eps_t.
double var_snr(const VarPolynomial& poly, const Eigen::MatrixXd& sigma_eps);

/// Random sparse VAR(1) transition: ceil(density p^2) entries drawn without
/// replacement, values +-Uniform(0.5, 1), then rescaled by bisection so that
/// var_snr(A, sigma_eps) == snr while the spectral radius stays <= 0.95.
/// An empty sigma_eps means the identity.
VarPolynomial gen_sparse_transition(int p, double density, double snr, const RngSeed& seed,
                                    const Eigen::MatrixXd& sigma_eps = {});

inline constexpr double kTransitionRadiusCap = 0.95;

/// Upper triangular VAR(1): alpha on the diagonal, gamma on the first two
/// superdiagonals, N(0, I) innovations.
ProcessSpec example1_predictor_spec(int p, double alpha, double gamma);

/// p independent AR(2) components X_t = 2a X_{t-1} - a^2 X_{t-2} + xi_t with
/// the innovation variance that gives unit marginal variance.
ProcessSpec example2_predictor_spec(int p, double alpha);

/// Univariate MA(2) noise eps_t = eta_t - 0.8 eta_{t-1} + 0.16 eta_{t-2}.
ProcessSpec ma2_noise_spec();

/// Random k-sparse vector: support uniform without replacement, entries with
/// random sign and magnitude uniform on [lo, hi].
Eigen::VectorXd random_sparse_vector(int q, int k, double lo, double hi, CounterRng& rng);

/// y_t = <beta*, X_t> + eps_t with eps drawn from a univariate noise process.
/// When `snr` is set the noise is rescaled so that the population ratio
/// sd(<beta*, X>) / sd(eps) equals it.
class RegressionScenario {
 public:
  RegressionScenario(Eigen::VectorXd beta_star, ProcessSpec predictors, ProcessSpec noise,
                     std::optional<double> snr);
  /// Same, with the predictor covariance Gamma_X(0) supplied by the caller
  /// (skips the Lyapunov solve for large structured predictor processes).
  RegressionScenario(Eigen::VectorXd beta_star, ProcessSpec predictors, ProcessSpec noise,
                     std::optional<double> snr, const Eigen::MatrixXd& predictor_cov);

  const Eigen::VectorXd& beta_star() const { return beta_star_; }
  const ProcessSpec& predictors() const { return predictors_; }
  const ProcessSpec& noise() const { return noise_; }
  const std::optional<double>& snr() const { return snr_; }
  /// Multiplier applied to the simulated noise path.
  double noise_scale() const { return noise_scale_; }
  double signal_variance() const { return signal_var_; }

 private:
  void calibrate(const Eigen::MatrixXd* predictor_cov);

  Eigen::VectorXd beta_star_;
  ProcessSpec predictors_;
  ProcessSpec noise_;
  std::optional<double> snr_;
  double signal_var_ = 0.0;
  double noise_scale_ = 1.0;
};

struct RegressionSample {
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;  // n
};

/// Predictors and noise come from independent child streams of `seed`.
RegressionSample simulate_regression(const RegressionScenario& scn, int n, const RngSeed& seed);

}  // namespace sparsets
