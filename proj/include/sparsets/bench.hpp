#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsets/processes.hpp"

namespace sparsets {

/// One long-format result line.
struct ResultRow {
  std::string experiment;
  std::string setting;  // e.g. "p=10;T=30;family=toeplitz;rho=0.9"
  std::string method;
  int replicate = 0;
  std::string metric;
  double value = 0.0;

  bool operator==(const ResultRow&) const = default;
};

/// Append-only table of result rows.
class ExperimentResult {
 public:
  void append(ResultRow row) { rows_.push_back(std::move(row)); }
  void append(const ExperimentResult& other);
  const std::vector<ResultRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Stable sort by (setting, method, replicate); metric order within a
  /// group is preserved.
  void sort();

  /// Values of `metric` for (setting, method), in replicate order.
  std::vector<double> values(const std::string& setting, const std::string& method,
                             const std::string& metric) const;
  std::vector<std::string> settings() const;

 private:
  std::vector<ResultRow> rows_;
};

struct ExperimentConfig {
  std::string experiment = "var";  // scaling | var | dependence
  std::vector<int> dims;
  std::vector<int> sample_sizes;        // n (regression) or T (VAR)
  std::vector<double> rescaled_sizes;   // scaling only: n = round(s k log p)
  std::vector<double> rhos;
  std::vector<CovFamily> families;
  int replicates = 50;
  std::uint64_t seed = 1;
  double lambda_constant = 1.0;
  std::string output;
  std::string format = "csv";

  // var benchmark
  double density = 0.05;
  double transition_snr = 2.0;  // variance ratio trace(Gamma(0)) / trace(Sigma_eps)
  std::string snr_reference = "error";  // "error": calibrate against Sigma_eps; "identity"
  int path_length = 50;
  double path_ratio = 0.01;

  // scaling experiment
  double regression_snr = 1.2;
  double ar2_alpha = 0.6;

  // dependence examples
  std::vector<double> gammas;  // example 1
  std::vector<double> alphas;  // example 2
  double example1_alpha = 0.2;
  bool standardize_predictors = true;  // example 1: rescale to unit marginal variance
  int example_sparsity = 0;    // 0 -> round(sqrt(p))

  int threads = 0;  // 0 -> SPARSETS_THREADS or hardware concurrency
};

/// Fills unset lists with the desk-scale defaults of each experiment.
ExperimentConfig with_defaults(ExperimentConfig cfg);

/// Lasso with AR(2) predictors (1.2, -0.36) and MA(2) noise at lambda =
/// c sqrt(log p / n); records l2_error, n and n / (k log p).
ExperimentResult run_scaling_experiment(const ExperimentConfig& cfg);

/// Sparse VAR(1) with SNR-calibrated transition and structured error
/// covariance; fits OLS, ridge, l1-LS, l1-LL, l1-LL-oracle and records auroc
/// and relative_error. Failed replicates are skipped and counted under the
/// "failures" metric.
ExperimentResult run_var_benchmark(const ExperimentConfig& cfg);

/// Lasso error curves for the cross-sectional (example 1) and temporal
/// (example 2) dependence families.
ExperimentResult run_dependence_examples(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class EmitFormat { Csv, Json };

/// Header `experiment,setting,method,replicate,metric,value`; values printed
/// with 17 significant digits. Throws IoError naming the path on failure.
void emit(const ExperimentResult& result, EmitFormat format, const std::string& path);
std::string to_csv(const ExperimentResult& result);
std::string to_json_text(const ExperimentResult& result);
ExperimentResult parse_csv(const std::string& text);

}  // namespace sparsets
