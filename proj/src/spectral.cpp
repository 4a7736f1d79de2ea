#include "sparsets/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

namespace sparsets {

namespace {

using cd = std::complex<double>;

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_stable(const ArmaSpec& spec) {
  if (spec.ar()) {
    const auto chk = is_stable(*spec.ar());
    if (!chk.stable) {
      std::ostringstream os;
      os << "AR polynomial is not stable (companion spectral radius " << chk.radius << ")";
      throw InvalidArgument(os.str());
    }
  }
  if (spec.ma()) {
    const auto chk = is_stable(*spec.ma());
    if (!chk.stable) {
      std::ostringstream os;
      os << "MA polynomial is not invertible (companion spectral radius " << chk.radius << ")";
      throw InvalidArgument(os.str());
    }
  }
}

// f(theta) without the stability precondition; callers validate once.
Eigen::MatrixXcd density_unchecked(const ArmaSpec& spec, double theta) {
  const cd z = std::polar(1.0, -theta);
  Eigen::MatrixXcd inner = spec.sigma_eps().cast<cd>();
  if (spec.ma()) {
    const Eigen::MatrixXcd b = eval_char_poly(*spec.ma(), z);
    inner = b * inner * b.adjoint();
  }
  if (spec.ar()) {
    const Eigen::MatrixXcd a = eval_char_poly(*spec.ar(), z);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    if (!(lu.rcond() > 1e-13)) {
      std::ostringstream os;
      os << "A(e^{-i theta}) is singular at theta = " << theta << " (process unstable there)";
      throw NumericalError(os.str());
    }
    const Eigen::MatrixXcd h = lu.solve(inner);  // A^{-1} M
    inner = lu.solve(h.adjoint()).adjoint();     // A^{-1} M A^{-*}
  }
  Eigen::MatrixXcd f = inner / (2.0 * std::numbers::pi);
  return 0.5 * (f + f.adjoint());
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

// Advances `idx` to the next k-combination of {0..n-1}; false when done.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// VarPolynomial / ArmaSpec

VarPolynomial::VarPolynomial(std::vector<Eigen::MatrixXd> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("VarPolynomial needs at least one lag (d >= 1)");
  const auto p = coeffs_.front().rows();
  if (p < 1) throw InvalidArgument("VarPolynomial dimension must be >= 1");
  for (const auto& a : coeffs_) {
    if (a.rows() != p || a.cols() != p) {
      throw InvalidArgument("VarPolynomial coefficients must all be p x p");
    }
  }
}

VarPolynomial VarPolynomial::zero(int p, int d) {
  if (p < 1 || d < 1) throw InvalidArgument("VarPolynomial::zero needs p >= 1 and d >= 1");
  return VarPolynomial(std::vector<Eigen::MatrixXd>(d, Eigen::MatrixXd::Zero(p, p)));
}

VarPolynomial VarPolynomial::scalar(std::span<const double> lags) {
  std::vector<Eigen::MatrixXd> c;
  for (double a : lags) c.push_back(Eigen::MatrixXd::Constant(1, 1, a));
  return VarPolynomial(std::move(c));
}

VarPolynomial VarPolynomial::scalar(std::initializer_list<double> lags) {
  return scalar(std::span<const double>(lags.begin(), lags.size()));
}

const Eigen::MatrixXd& VarPolynomial::coeff(int lag) const {
  if (lag < 1 || lag > order()) throw InvalidArgument("lag out of range");
  return coeffs_[lag - 1];
}

VarPolynomial VarPolynomial::scaled(double c) const {
  auto out = coeffs_;
  for (auto& a : out) a *= c;
  return VarPolynomial(std::move(out));
}

ArmaSpec::ArmaSpec(std::optional<VarPolynomial> ar, std::optional<VarPolynomial> ma,
                   Eigen::MatrixXd sigma_eps)
    : ar_(std::move(ar)), ma_(std::move(ma)), sigma_eps_(std::move(sigma_eps)) {
  const auto p = sigma_eps_.rows();
  if (p < 1 || sigma_eps_.cols() != p) throw InvalidArgument("sigma_eps must be square");
  if (ar_ && ar_->dim() != p) throw InvalidArgument("AR dimension does not match sigma_eps");
  if (ma_ && ma_->dim() != p) throw InvalidArgument("MA dimension does not match sigma_eps");
  if (!is_symmetric(sigma_eps_, 1e-10)) throw InvalidArgument("sigma_eps must be symmetric");
  if (!(min_eigenvalue(sigma_eps_) > 1e-10)) {
    throw InvalidArgument("sigma_eps must be positive definite");
  }
}

ArmaSpec ArmaSpec::white_noise(const Eigen::MatrixXd& sigma_eps) {
  return ArmaSpec(std::nullopt, std::nullopt, sigma_eps);
}

ArmaSpec ArmaSpec::var(VarPolynomial ar, Eigen::MatrixXd sigma_eps) {
  return ArmaSpec(std::move(ar), std::nullopt, std::move(sigma_eps));
}

// ---------------------------------------------------------------------------
// Polynomial algebra

Eigen::MatrixXd companion_matrix(const VarPolynomial& poly) {
  const int p = poly.dim();
  const int d = poly.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d * p, d * p);
  for (int t = 0; t < d; ++t) c.block(0, t * p, p, p) = poly.coeffs()[t];
  for (int t = 1; t < d; ++t) c.block(t * p, (t - 1) * p, p, p).setIdentity();
  return c;
}

StabilityCheck is_stable(const VarPolynomial& poly, double margin) {
  if (margin < 0.0 || margin >= 1.0) throw InvalidArgument("stability margin must lie in [0, 1)");
  const double r = spectral_radius(companion_matrix(poly));
  return {r < 1.0 - margin, r};
}

Eigen::MatrixXcd eval_char_poly(const VarPolynomial& poly, std::complex<double> z) {
  const int p = poly.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(p, p);
  cd zt = 1.0;
  for (const auto& a : poly.coeffs()) {
    zt *= z;
    out -= zt * a.cast<cd>();
  }
  return out;
}

std::vector<double> frequency_grid(int grid_size) {
  if (grid_size < 1) throw InvalidArgument("grid_size must be positive");
  std::vector<double> g(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    g[j] = -std::numbers::pi + 2.0 * std::numbers::pi * j / grid_size;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Spectra and stability measures

HermitianSpectrum spectral_density(const ArmaSpec& spec, double theta) {
  require_stable(spec);
  return {theta, density_unchecked(spec, theta)};
}

std::vector<HermitianSpectrum> spectrum_on_grid(const ArmaSpec& spec, int grid_size) {
  require_stable(spec);
  std::vector<HermitianSpectrum> out;
  out.reserve(grid_size);
  for (double th : frequency_grid(grid_size)) out.push_back({th, density_unchecked(spec, th)});
  return out;
}

MuExtremes mu_extremes(const VarPolynomial& poly, int grid_size) {
  if (grid_size < 64) throw InvalidArgument("mu_extremes needs grid_size >= 64");
  MuExtremes mu{std::numeric_limits<double>::infinity(), 0.0};
  for (double th : frequency_grid(grid_size)) {
    const Eigen::MatrixXcd a = eval_char_poly(poly, std::polar(1.0, -th));
    const auto r = hermitian_eigen_range(a.adjoint() * a);
    mu.min = std::min(mu.min, r.min);
    mu.max = std::max(mu.max, r.max);
  }
  mu.min = std::max(mu.min, 0.0);
  return mu;
}

StabilityReport stability_measures(const ArmaSpec& spec, int grid_size, std::span<const int> ks) {
  require_stable(spec);
  StabilityReport rep;
  rep.grid_size = grid_size;
  rep.m_lower = std::numeric_limits<double>::infinity();
  for (double th : frequency_grid(grid_size)) {
    const auto r = hermitian_eigen_range(density_unchecked(spec, th));
    rep.m_upper = std::max(rep.m_upper, r.max);
    rep.m_lower = std::min(rep.m_lower, r.min);
  }
  rep.m_lower = std::max(rep.m_lower, 0.0);
  if (spec.ar()) {
    const auto mu = mu_extremes(*spec.ar(), std::max(grid_size, 64));
    rep.mu_min = mu.min;
    rep.mu_max = mu.max;
  } else {
    rep.mu_min = rep.mu_max = 1.0;
  }
  for (int k : ks) rep.k_sparse[k] = subprocess_stability(spec, k, grid_size).value;
  return rep;
}

SubprocessStability subprocess_stability(const ArmaSpec& spec, int k, int grid_size,
                                         std::size_t cap) {
  if (k < 1) throw InvalidArgument("subprocess size k must be >= 1");
  const int p = spec.dim();
  if (k >= p) return {stability_measures(spec, grid_size).m_upper, true};
  if (binomial(p, k) > static_cast<double>(cap)) {
    return {stability_measures(spec, grid_size).m_upper, false};
  }
  require_stable(spec);

  // Lambda_max of a principal submatrix is monotone under inclusion, so
  // subsets of size exactly k attain the maximum over |J| <= k.
  std::vector<std::vector<int>> subsets;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  do {
    subsets.push_back(idx);
  } while (next_combination(idx, p));

  double best = 0.0;
  Eigen::MatrixXcd sub(k, k);
  for (double th : frequency_grid(grid_size)) {
    const Eigen::MatrixXcd f = density_unchecked(spec, th);
    for (const auto& s : subsets) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = f(s[a], s[b]);
      best = std::max(best, hermitian_eigen_range(sub).max);
    }
  }
  return {best, true};
}

// ---------------------------------------------------------------------------
// Autocovariances

LyapunovSolution solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q,
                                         double tol, int max_iter) {
  if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.cols()) {
    throw InvalidArgument("Lyapunov equation: shape mismatch");
  }
  // Doubling form of the fixed-point iteration X <- A X A' + Q: after k
  // steps X holds sum_{j < 2^k} A^j Q A'^j.
  LyapunovSolution sol;
  sol.x = q;
  Eigen::MatrixXd ak = a;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd inc = ak * sol.x * ak.transpose();
    sol.x += inc;
    ak = ak * ak;
    sol.iterations = it;
    if (!sol.x.allFinite()) break;
    if (max_abs(inc) <= tol * std::max(1.0, max_abs(sol.x))) {
      converged = true;
      break;
    }
  }
  sol.x = 0.5 * (sol.x + sol.x.transpose());
  sol.residual = sol.x.allFinite() ? max_abs(sol.x - a * sol.x * a.transpose() - q)
                                   : std::numeric_limits<double>::infinity();
  if (!converged || sol.residual > 1e-8 * std::max(1.0, max_abs(sol.x))) {
    std::ostringstream os;
    os << "Lyapunov solver did not converge after " << sol.iterations
       << " iterations (residual " << sol.residual << ")";
    throw NumericalError(os.str());
  }
  return sol;
}

std::vector<Eigen::MatrixXd> var_autocovariance(const VarPolynomial& poly,
                                                const Eigen::MatrixXd& sigma_eps, int max_lag) {
  const int p = poly.dim();
  const int d = poly.order();
  if (sigma_eps.rows() != p || sigma_eps.cols() != p) {
    throw InvalidArgument("sigma_eps dimension does not match the polynomial");
  }
  if (max_lag < 0) throw InvalidArgument("max_lag must be >= 0");
  const auto chk = is_stable(poly);
  if (!chk.stable) throw InvalidArgument("var_autocovariance requires a stable polynomial");

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d * p, d * p);
  q.topLeftCorner(p, p) = sigma_eps;
  const auto sol = solve_discrete_lyapunov(companion_matrix(poly), q);

  std::vector<Eigen::MatrixXd> g;
  g.reserve(max_lag + 1);
  for (int h = 0; h <= max_lag; ++h) {
    if (h < d) {
      g.push_back(sol.x.block(0, h * p, p, p));
    } else {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
      for (int i = 1; i <= d; ++i) acc += poly.coeff(i) * g[h - i];
      g.push_back(std::move(acc));
    }
  }
  return g;
}

std::vector<Eigen::MatrixXd> arma_autocovariance(const ArmaSpec& spec, int max_lag) {
  if (max_lag < 0) throw InvalidArgument("max_lag must be >= 0");
  require_stable(spec);
  const int p = spec.dim();
  const int dx = spec.ar() ? spec.ar()->order() : 1;
  const int de = spec.ma() ? spec.ma()->order() : 0;
  const int n = (dx + de) * p;

  // state: [X_t .. X_{t-dx+1}, eps_t .. eps_{t-de+1}]
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, p);
  if (spec.ar()) {
    for (int i = 0; i < dx; ++i) f.block(0, i * p, p, p) = spec.ar()->coeffs()[i];
  }
  for (int i = 1; i < dx; ++i) f.block(i * p, (i - 1) * p, p, p).setIdentity();
  g.topRows(p).setIdentity();
  if (de > 0) {
    const int e0 = dx * p;
    for (int j = 0; j < de; ++j) f.block(0, e0 + j * p, p, p) = -spec.ma()->coeffs()[j];
    g.block(e0, 0, p, p).setIdentity();
    for (int j = 1; j < de; ++j) f.block(e0 + j * p, e0 + (j - 1) * p, p, p).setIdentity();
  }
  const auto sol = solve_discrete_lyapunov(f, g * spec.sigma_eps() * g.transpose());

  std::vector<Eigen::MatrixXd> out;
  out.reserve(max_lag + 1);
  // Gamma(h) = H F^h P H'; propagate F^h P H' column block.
  Eigen::MatrixXd col = sol.x.leftCols(p);
  for (int h = 0; h <= max_lag; ++h) {
    out.push_back(col.topRows(p));
    col = f * col;
  }
  return out;
}

Eigen::MatrixXd block_toeplitz_cov(std::span<const Eigen::MatrixXd> gammas, int n) {
  if (n < 1) throw InvalidArgument("block_toeplitz_cov needs n >= 1");
  if (static_cast<int>(gammas.size()) < n) {
    throw InvalidArgument("block_toeplitz_cov needs autocovariances for lags 0..n-1");
  }
  const auto p = gammas[0].rows();
  Eigen::MatrixXd u(n * p, n * p);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      u.block(r * p, s * p, p, p) = r >= s ? gammas[r - s] : Eigen::MatrixXd(gammas[s - r].transpose());
    }
  }
  return 0.5 * (u + u.transpose());
}

}  // namespace sparsets
