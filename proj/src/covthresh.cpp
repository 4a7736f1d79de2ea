#include "sparsets/covthresh.hpp"

#include <algorithm>
#include <cmath>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"
#include "sparsets/parallel.hpp"
#include "sparsets/stats.hpp"

namespace sparsets {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw InvalidArgument("sample covariance needs n >= 2");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd c = data.rowwise() - mean;
  Eigen::MatrixXd s = c.transpose() * c / static_cast<double>(data.rows());
  return 0.5 * (s + s.transpose());
}

ThresholdedCov hard_threshold(const Eigen::MatrixXd& cov, double u, int sample_size,
                              bool keep_diagonal) {
  if (!(u >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  if (cov.rows() != cov.cols()) throw InvalidArgument("covariance must be square");
  ThresholdedCov out{cov, u, sample_size};
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
      if (keep_diagonal && i == j) continue;
      if (std::abs(cov(i, j)) <= u) out.estimate(i, j) = 0.0;
    }
  }
  return out;
}

double threshold_rule(int n, int p, double stability_m2, double constant) {
  if (n < 2 || p < 2) throw InvalidArgument("threshold rule needs n, p >= 2");
  if (!(stability_m2 > 0.0)) throw InvalidArgument("stability measure must be positive");
  return constant * stability_m2 * std::sqrt(std::log(static_cast<double>(p)) / n);
}

double operator_norm_sym(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd ev = symmetric_eigenvalues(0.5 * (m + m.transpose()));
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

ConsistencyCurve consistency_curve(const ProcessSpec& spec, const Eigen::MatrixXd& truth,
                                   std::span<const int> ns, int replicates, const RngSeed& seed,
                                   double constant, int grid_size) {
  const int p = spec.dim();
  if (truth.rows() != p || truth.cols() != p) throw InvalidArgument("truth must be p x p");
  if (replicates < 1) throw InvalidArgument("need at least one replicate");

  ConsistencyCurve curve;
  curve.constant = constant;
  curve.stability_m2 = subprocess_stability(spec.arma(), 2, grid_size).value;

  for (int n : ns) {
    ConsistencyPoint pt;
    pt.n = n;
    pt.threshold = threshold_rule(n, p, curve.stability_m2, constant);
    pt.operator_errors.assign(replicates, 0.0);
    pt.frobenius_errors.assign(replicates, 0.0);
    pt.recovered.assign(replicates, false);
    std::vector<char> rec(replicates, 0);
    parallel_for(replicates, [&](int r) {
      const Eigen::MatrixXd x = simulate(spec, n, seed.derive("n", n).derive("rep", r));
      const auto th = hard_threshold(sample_cov(x), pt.threshold, n);
      const Eigen::MatrixXd diff = th.estimate - truth;
      pt.operator_errors[r] = operator_norm_sym(diff);
      pt.frobenius_errors[r] = diff.norm() / p;
      bool same = true;
      for (int i = 0; i < p && same; ++i)
        for (int j = 0; j < p && same; ++j) same = (th.estimate(i, j) != 0.0) == (truth(i, j) != 0.0);
      rec[r] = same;
    });
    for (int r = 0; r < replicates; ++r) pt.recovered[r] = rec[r] != 0;
    pt.median_operator_error = median(pt.operator_errors);
    pt.median_frobenius_error = median(pt.frobenius_errors);
    pt.support_recovery =
        static_cast<double>(std::count(rec.begin(), rec.end(), 1)) / replicates;
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace sparsets
