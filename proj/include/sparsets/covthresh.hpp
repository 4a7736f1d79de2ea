#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "sparsets/processes.hpp"
#include "sparsets/rng.hpp"

namespace sparsets {

struct ThresholdedCov {
  Eigen::MatrixXd estimate;
  double threshold = 0.0;
  int sample_size = 0;
};

/// (1/n) sum_t (X_t - mean)(X_t - mean)'. Needs n >= 2 rows.
Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& data);

/// Zeroes every entry with |value| <= u, the diagonal included unless
/// `keep_diagonal` is set.
ThresholdedCov hard_threshold(const Eigen::MatrixXd& cov, double u, int sample_size = 0,
                              bool keep_diagonal = false);

/// u = constant * M(f, 2) * sqrt(log p / n).
double threshold_rule(int n, int p, double stability_m2, double constant = 2.0);

struct ConsistencyPoint {
  int n = 0;
  double threshold = 0.0;
  double median_operator_error = 0.0;
  double median_frobenius_error = 0.0;  // ||.||_F / p
  double support_recovery = 0.0;        // fraction of replicates with the exact support
  std::vector<double> operator_errors;  // per replicate
  std::vector<double> frobenius_errors;
  std::vector<bool> recovered;
};

struct ConsistencyCurve {
  double stability_m2 = 0.0;
  double constant = 0.0;
  std::vector<ConsistencyPoint> points;
};

/// Thresholds the sample covariance of simulated paths at the rule threshold
/// and compares it with `truth` for every n, over `replicates` seeded paths.
ConsistencyCurve consistency_curve(const ProcessSpec& spec, const Eigen::MatrixXd& truth,
                                   std::span<const int> ns, int replicates, const RngSeed& seed,
                                   double constant = 2.0, int grid_size = 2048);

/// Largest absolute eigenvalue of a symmetric matrix.
double operator_norm_sym(const Eigen::MatrixXd& m);

}  // namespace sparsets
