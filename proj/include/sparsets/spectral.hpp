#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sparsets {

inline constexpr int kDefaultGridSize = 2048;
inline constexpr std::size_t kDefaultSubsetCap = 10000;

/// Lag polynomial A(z) = I - sum_t A_t z^t of a p-dimensional VAR(d) (or the
/// MA polynomial B(z) of an ARMA process, same convention).
class VarPolynomial {
 public:
  /// Throws InvalidArgument unless there is at least one lag and every
  /// coefficient is p x p for a common p >= 1.
  explicit VarPolynomial(std::vector<Eigen::MatrixXd> coeffs);

  static VarPolynomial zero(int p, int d = 1);
  /// p = 1 polynomial with the given lag coefficients a_1..a_d.
  static VarPolynomial scalar(std::span<const double> lags);
  static VarPolynomial scalar(std::initializer_list<double> lags);

  int dim() const { return static_cast<int>(coeffs_.front().rows()); }
  int order() const { return static_cast<int>(coeffs_.size()); }

  /// Coefficient of z^lag, lag in [1, order()].
  const Eigen::MatrixXd& coeff(int lag) const;
  const std::vector<Eigen::MatrixXd>& coeffs() const { return coeffs_; }

  VarPolynomial scaled(double c) const;

 private:
  std::vector<Eigen::MatrixXd> coeffs_;
};

/// ARMA(d, l): A(L) X_t = B(L) eps_t with eps_t ~ N(0, sigma_eps). Either
/// polynomial may be absent (pure MA / pure AR / white noise).
class ArmaSpec {
 public:
  ArmaSpec(std::optional<VarPolynomial> ar, std::optional<VarPolynomial> ma,
           Eigen::MatrixXd sigma_eps);

  static ArmaSpec white_noise(const Eigen::MatrixXd& sigma_eps);
  static ArmaSpec var(VarPolynomial ar, Eigen::MatrixXd sigma_eps);

  int dim() const { return static_cast<int>(sigma_eps_.rows()); }
  const std::optional<VarPolynomial>& ar() const { return ar_; }
  const std::optional<VarPolynomial>& ma() const { return ma_; }
  const Eigen::MatrixXd& sigma_eps() const { return sigma_eps_; }

 private:
  std::optional<VarPolynomial> ar_;
  std::optional<VarPolynomial> ma_;
  Eigen::MatrixXd sigma_eps_;
};

struct HermitianSpectrum {
  double theta = 0.0;
  Eigen::MatrixXcd value;  // variance per radian
};

struct StabilityReport {
  double m_upper = 0.0;  // M(f): max over the grid of the top eigenvalue
  double m_lower = 0.0;  // m(f): min over the grid of the bottom eigenvalue
  double mu_min = 0.0;   // mu_min(A)
  double mu_max = 0.0;   // mu_max(A)
  int grid_size = 0;
  std::map<int, double> k_sparse;  // k -> M(f, k)
};

struct StabilityCheck {
  bool stable = false;
  double radius = 0.0;
};

struct MuExtremes {
  double min = 0.0;
  double max = 0.0;
};

struct SubprocessStability {
  double value = 0.0;
  bool exact = true;  // false: subset count exceeded the cap, value is M(f)
};

/// dp x dp companion matrix: top block row [A_1 ... A_d], identity blocks on
/// the block subdiagonal.
Eigen::MatrixXd companion_matrix(const VarPolynomial& poly);

/// Stable iff the spectral radius of the companion matrix is < 1 - margin.
StabilityCheck is_stable(const VarPolynomial& poly, double margin = 0.0);

/// I - sum_t A_t z^t.
Eigen::MatrixXcd eval_char_poly(const VarPolynomial& poly, std::complex<double> z);

/// Uniform grid on [-pi, pi) with `grid_size` points.
std::vector<double> frequency_grid(int grid_size);

/// Spectral density (1/2pi) A^{-1}(e^{-i theta}) B Sigma B^* A^{-*}.
/// Throws InvalidArgument if the AR part is unstable or the MA part is not
/// invertible, NumericalError if A(e^{-i theta}) is numerically singular.
HermitianSpectrum spectral_density(const ArmaSpec& spec, double theta);

/// Spectral density at every point of `frequency_grid(grid_size)`.
std::vector<HermitianSpectrum> spectrum_on_grid(const ArmaSpec& spec, int grid_size);

/// (min, max) over the grid of the extreme eigenvalues of A^*(z) A(z), |z| = 1.
MuExtremes mu_extremes(const VarPolynomial& poly, int grid_size = kDefaultGridSize);

/// M(f), m(f), mu_min/mu_max of the AR polynomial and M(f, k) for each k in
/// `ks`.
StabilityReport stability_measures(const ArmaSpec& spec, int grid_size = kDefaultGridSize,
                                   std::span<const int> ks = {});

/// M(f, k): largest M(f_{X(J)}) over coordinate subsets with |J| <= k.
/// Enumerates subsets while C(p, k) <= cap; otherwise returns M(f) flagged
/// inexact (always a valid upper bound).
SubprocessStability subprocess_stability(const ArmaSpec& spec, int k,
                                         int grid_size = kDefaultGridSize,
                                         std::size_t cap = kDefaultSubsetCap);

/// Solution of X = A X A' + Q for a stable A (spectral radius < 1).
struct LyapunovSolution {
  Eigen::MatrixXd x;
  int iterations = 0;
  double residual = 0.0;  // max-norm of X - A X A' - Q
};
LyapunovSolution solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q,
                                         double tol = 1e-12, int max_iter = 10000);

/// Autocovariances Gamma(h) = E[X_{t+h} X_t'] for h = 0..max_lag of a stable
/// VAR, from the stationary covariance of the companion process.
std::vector<Eigen::MatrixXd> var_autocovariance(const VarPolynomial& poly,
                                                const Eigen::MatrixXd& sigma_eps, int max_lag);

/// Same for a full ARMA spec (state-space form with the lagged innovations
/// appended to the state).
std::vector<Eigen::MatrixXd> arma_autocovariance(const ArmaSpec& spec, int max_lag);

/// np x np covariance of n consecutive observations: block (r, s) is
/// Gamma(r - s) with Gamma(-h) = Gamma(h)'. Needs gammas for lags 0..n-1.
Eigen::MatrixXd block_toeplitz_cov(std::span<const Eigen::MatrixXd> gammas, int n);

}  // namespace sparsets
