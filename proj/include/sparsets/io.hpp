#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "sparsets/bench.hpp"
#include "sparsets/covthresh.hpp"
#include "sparsets/diagnostics.hpp"
#include "sparsets/processes.hpp"
#include "sparsets/spectral.hpp"
#include "sparsets/var.hpp"

namespace sparsets {

using Json = nlohmann::json;

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

/// Comma-separated numbers, one row per line, no header row.
Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& what = "matrix");
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

/// Nested row arrays: [[a, b], [c, d]].
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& field);

/// Accepts either a bare nested array or an object holding one under
/// "sigma" or "matrix".
Eigen::MatrixXd covariance_from_json(const Json& j);

/// {"ar": [A_1, ...], "ma": [B_1, ...], "sigma": S, "burn_in": 500}; "ar" and
/// "ma" are optional, "sigma" is required.
ProcessSpec spec_from_json(const Json& j);
Json spec_to_json(const ProcessSpec& spec);

/// Per-lag sparse triplets {"lag": t, "entries": [[row, col, value], ...]}.
Json polynomial_to_json(const VarPolynomial& poly);
VarPolynomial polynomial_from_json(const Json& j, int p, int d);
Json estimate_to_json(const VarEstimate& est);

Json stability_report_to_json(const StabilityReport& r);
/// Columns theta,index,eigenvalue; eigenvalues ascending within each theta.
std::string spectrum_to_csv(const std::vector<HermitianSpectrum>& spectrum);

Json to_json(const ReCertificate& c);
Json to_json(const DeviationReport& r);
Json to_json(const CrossDeviationReport& r);
Json to_json(const SandwichReport& r);
Json to_json(const RateAudit& a);
Json to_json(const ConsistencyCurve& c);

/// Field-for-field mirror of ExperimentConfig. Unknown keys are rejected with
/// the offending name.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

}  // namespace sparsets
