#include "sparsets/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

namespace sparsets {

ProcessSpec::ProcessSpec(ArmaSpec arma, int burn_in) : arma_(std::move(arma)), burn_in_(burn_in) {
  if (burn_in_ < 0) throw InvalidArgument("burn_in must be >= 0");
  if (arma_.ar() && !is_stable(*arma_.ar()).stable) {
    throw InvalidArgument("process AR part is not stable");
  }
  if (arma_.ma() && !is_stable(*arma_.ma()).stable) {
    throw InvalidArgument("process MA part is not invertible");
  }
}

std::string to_string(CovFamily f) {
  switch (f) {
    case CovFamily::BlockI: return "block1";
    case CovFamily::BlockII: return "block2";
    case CovFamily::Toeplitz: return "toeplitz";
    case CovFamily::Identity: return "identity";
  }
  return "identity";
}

CovFamily cov_family_from_string(const std::string& name) {
  if (name == "block1" || name == "Block-I") return CovFamily::BlockI;
  if (name == "block2" || name == "Block-II") return CovFamily::BlockII;
  if (name == "toeplitz" || name == "Toeplitz") return CovFamily::Toeplitz;
  if (name == "identity" || name == "Identity") return CovFamily::Identity;
  throw InvalidArgument("unknown covariance family '" + name + "'");
}

Eigen::MatrixXd simulate(const ProcessSpec& spec, int T, const RngSeed& seed) {
  if (T < 1) throw InvalidArgument("simulate needs T >= 1");
  const ArmaSpec& arma = spec.arma();
  const int p = arma.dim();
  const int d = arma.ar() ? arma.ar()->order() : 0;
  const int l = arma.ma() ? arma.ma()->order() : 0;
  const Eigen::MatrixXd chol = cholesky_lower(arma.sigma_eps(), "sigma_eps");

  const int total = spec.burn_in() + T;
  CounterRng rng(seed);
  // Ring buffers indexed by time; zero initial state.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(p, total);
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(p, total);
  for (int t = 0; t < total; ++t) {
    eps.col(t) = chol * rng.normal_vector(p);
    Eigen::VectorXd v = eps.col(t);
    for (int i = 1; i <= d && t - i >= 0; ++i) v.noalias() += arma.ar()->coeff(i) * x.col(t - i);
    for (int j = 1; j <= l && t - j >= 0; ++j) v.noalias() -= arma.ma()->coeff(j) * eps.col(t - j);
    x.col(t) = v;
  }
  return x.rightCols(T).transpose();
}

Eigen::MatrixXd build_error_cov(const ErrorCovFamily& fam) {
  const int p = fam.p;
  const double rho = fam.rho;
  if (p < 1) throw InvalidArgument("error covariance dimension must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
  const bool block = fam.family == CovFamily::BlockI || fam.family == CovFamily::BlockII;
  if (block && p % 2 != 0) throw InvalidArgument("block covariance families need even p");

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(p, p);
  const int half = p / 2;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      switch (fam.family) {
        case CovFamily::BlockI:
          if (i < half && j < half) s(i, j) = rho;
          break;
        case CovFamily::BlockII:
          if ((i < half && j < half) || (i >= half && j >= half)) s(i, j) = rho;
          break;
        case CovFamily::Toeplitz:
          s(i, j) = std::pow(rho, std::abs(i - j));
          break;
        case CovFamily::Identity:
          break;
      }
    }
  }
  if (!(min_eigenvalue(s) > 1e-10)) {
    throw NumericalError("error covariance " + to_string(fam.family) + " is not positive definite");
  }
  return s;
}

double var_snr(const VarPolynomial& poly, const Eigen::MatrixXd& sigma_eps) {
  const auto g = var_autocovariance(poly, sigma_eps, 0);
  return std::sqrt(g[0].trace() / sigma_eps.trace());
}

namespace {

// A matrix whose support graph has no cycle is nilpotent for every choice of
// values; its numerical spectral radius is rounding noise.
bool structurally_nilpotent(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd pattern = (a.array() != 0.0).cast<double>().matrix();
  Eigen::MatrixXd power = pattern;
  for (Eigen::Index i = 1; i < a.rows(); ++i) {
    power = (power * pattern).cwiseMin(1.0);
    if (power.isZero(0.0)) return true;
  }
  return power.isZero(0.0);
}

}  // namespace

VarPolynomial gen_sparse_transition(int p, double density, double snr, const RngSeed& seed,
                                    const Eigen::MatrixXd& sigma_eps) {
  if (p < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(density > 0.0 && density < 1.0)) throw InvalidArgument("density must lie in (0, 1)");
  if (!(snr > 0.0)) throw InvalidArgument("snr must be positive");

  CounterRng rng(seed);
  const int cells = p * p;
  const int nnz = std::clamp(static_cast<int>(std::ceil(density * cells - 1e-9)), 1, cells);
  std::vector<int> idx(cells);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < nnz; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(cells - i)));
    std::swap(idx[i], idx[j]);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < nnz; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    a(idx[i] / p, idx[i] % p) = sign * rng.uniform(0.5, 1.0);
  }

  const Eigen::MatrixXd sigma =
      sigma_eps.size() == 0 ? Eigen::MatrixXd::Identity(p, p) : sigma_eps;
  if (sigma.rows() != p || sigma.cols() != p) throw InvalidArgument("sigma_eps must be p x p");
  const VarPolynomial base(std::vector<Eigen::MatrixXd>{a});
  auto snr_at = [&](double s) { return var_snr(base.scaled(s), sigma); };

  if (snr <= 1.0) {
    std::ostringstream os;
    os << "requested snr " << snr << " is infeasible: the snr functional is >= 1 for any "
       << "transition matrix";
    throw NumericalError(os.str());
  }
  double hi;
  if (!structurally_nilpotent(a)) {
    hi = kTransitionRadiusCap / spectral_radius(a);
    const double best = snr_at(hi);
    if (best < snr) {
      std::ostringstream os;
      os << "requested snr " << snr << " is infeasible under the spectral radius cap "
         << kTransitionRadiusCap << "; maximal achievable snr is " << best;
      throw NumericalError(os.str());
    }
  } else {
    // nilpotent support: the snr is unbounded in the scale, grow the bracket
    hi = 1.0;
    while (snr_at(hi) < snr) {
      hi *= 2.0;
      if (hi > 1e12) throw NumericalError("could not bracket the requested snr");
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (snr_at(mid) < snr ? lo : hi) = mid;
  }
  return base.scaled(lo + 0.5 * (hi - lo));
}

ProcessSpec example1_predictor_spec(int p, double alpha, double gamma) {
  if (p < 1) throw InvalidArgument("dimension must be >= 1");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    a(i, i) = alpha;
    if (i + 1 < p) a(i, i + 1) = gamma;
    if (i + 2 < p) a(i, i + 2) = gamma;
  }
  VarPolynomial poly(std::vector<Eigen::MatrixXd>{a});
  if (!is_stable(poly).stable) {
    throw InvalidArgument("example 1 predictor process is unstable for these parameters");
  }
  return ProcessSpec(ArmaSpec::var(std::move(poly), Eigen::MatrixXd::Identity(p, p)));
}

ProcessSpec example2_predictor_spec(int p, double alpha) {
  if (p < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  VarPolynomial poly(std::vector<Eigen::MatrixXd>{2.0 * alpha * eye, -alpha * alpha * eye});
  // AR(2) with roots at 1/alpha (double): gamma_0 = s2 (1 + a^2) / (1 - a^2)^3.
  const double a2 = alpha * alpha;
  const double s2 = std::pow(1.0 - a2, 3) / (1.0 + a2);
  return ProcessSpec(ArmaSpec::var(std::move(poly), s2 * eye));
}

ProcessSpec ma2_noise_spec() {
  // B(z) = 1 - B_1 z - B_2 z^2 = 1 - 0.8 z + 0.16 z^2
  return ProcessSpec(ArmaSpec(std::nullopt, VarPolynomial::scalar({0.8, -0.16}),
                              Eigen::MatrixXd::Identity(1, 1)));
}

Eigen::VectorXd random_sparse_vector(int q, int k, double lo, double hi, CounterRng& rng) {
  if (k < 0 || k > q) throw InvalidArgument("sparsity must lie in [0, q]");
  std::vector<int> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(q - i)));
    std::swap(idx[i], idx[j]);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    v(idx[i]) = sign * rng.uniform(lo, hi);
  }
  return v;
}

RegressionScenario::RegressionScenario(Eigen::VectorXd beta_star, ProcessSpec predictors,
                                       ProcessSpec noise, std::optional<double> snr)
    : beta_star_(std::move(beta_star)),
      predictors_(std::move(predictors)),
      noise_(std::move(noise)),
      snr_(snr) {
  calibrate(nullptr);
}

RegressionScenario::RegressionScenario(Eigen::VectorXd beta_star, ProcessSpec predictors,
                                       ProcessSpec noise, std::optional<double> snr,
                                       const Eigen::MatrixXd& predictor_cov)
    : beta_star_(std::move(beta_star)),
      predictors_(std::move(predictors)),
      noise_(std::move(noise)),
      snr_(snr) {
  calibrate(&predictor_cov);
}

void RegressionScenario::calibrate(const Eigen::MatrixXd* predictor_cov) {
  if (beta_star_.size() != predictors_.dim()) {
    throw InvalidArgument("beta_star length does not match the predictor dimension");
  }
  if (noise_.dim() != 1) throw InvalidArgument("regression noise must be univariate");
  if (predictor_cov && (predictor_cov->rows() != predictors_.dim() ||
                        predictor_cov->cols() != predictors_.dim())) {
    throw InvalidArgument("predictor covariance must be p x p");
  }
  if (!snr_) return;
  if (!(*snr_ > 0.0)) throw InvalidArgument("snr must be positive");
  if (beta_star_.isZero(0.0)) throw InvalidArgument("snr is undefined for a zero signal");
  const Eigen::MatrixXd gx =
      predictor_cov ? *predictor_cov : arma_autocovariance(predictors_.arma(), 0)[0];
  signal_var_ = beta_star_.dot(gx * beta_star_);
  const double noise_var = arma_autocovariance(noise_.arma(), 0)[0](0, 0);
  noise_scale_ = std::sqrt(signal_var_ / noise_var) / *snr_;
}

RegressionSample simulate_regression(const RegressionScenario& scn, int n, const RngSeed& seed) {
  RegressionSample s;
  s.x = simulate(scn.predictors(), n, seed.derive("predictors"));
  const Eigen::MatrixXd eps = simulate(scn.noise(), n, seed.derive("noise"));
  s.y = s.x * scn.beta_star() + scn.noise_scale() * eps.col(0);
  return s;
}

}  // namespace sparsets
