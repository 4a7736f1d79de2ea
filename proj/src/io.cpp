#include "sparsets/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"

namespace sparsets {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vec_json(const std::vector<double>& v) { return Json(v); }

std::vector<double> number_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidArgument(field + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw InvalidArgument(field + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> int_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidArgument(field + ": expected an array of integers");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw InvalidArgument(field + ": expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<Eigen::MatrixXd> lag_list(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(field + ": expected a nonempty list of matrices");
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(matrix_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

Json read_json(const std::string& path) {
  const auto text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (cell.empty() || end == cell.c_str() || *end != '\0') {
        throw InvalidArgument(what + " line " + std::to_string(lineno) + ": '" + cell +
                              "' is not a number");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument(what + " line " + std::to_string(lineno) + ": expected " +
                            std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument(what + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += num(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  return parse_matrix_csv(read_text(path), "'" + path + "'");
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  write_text(path, matrix_to_csv(m));
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw InvalidArgument(field + ": expected a nonempty matrix");
  const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
  if (flat) {
    // A flat list is read as a 1 x 1 matrix only when it has one entry.
    if (j.size() != 1) throw InvalidArgument(field + ": expected nested row arrays");
    return Eigen::MatrixXd::Constant(1, 1, j[0].get<double>());
  }
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols || cols == 0)
      throw InvalidArgument(field + ": rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InvalidArgument(field + ": entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Eigen::MatrixXd covariance_from_json(const Json& j) {
  if (j.is_object()) {
    if (j.contains("sigma")) return matrix_from_json(j["sigma"], "sigma");
    if (j.contains("matrix")) return matrix_from_json(j["matrix"], "matrix");
    throw InvalidArgument("sigma: object needs a 'sigma' or 'matrix' field");
  }
  return matrix_from_json(j, "sigma");
}

ProcessSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("spec: expected a JSON object");
  static const std::set<std::string> known{"ar", "ma", "sigma", "burn_in"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InvalidArgument("spec: unknown field '" + key + "'");
  if (!j.contains("sigma")) throw InvalidArgument("spec: missing field 'sigma'");
  const Eigen::MatrixXd sigma = matrix_from_json(j["sigma"], "sigma");
  std::optional<VarPolynomial> ar, ma;
  if (j.contains("ar") && !j["ar"].is_null()) ar = VarPolynomial(lag_list(j["ar"], "ar"));
  if (j.contains("ma") && !j["ma"].is_null()) ma = VarPolynomial(lag_list(j["ma"], "ma"));
  int burn_in = kDefaultBurnIn;
  if (j.contains("burn_in")) {
    if (!j["burn_in"].is_number_integer() || j["burn_in"].get<int>() < 0)
      throw InvalidArgument("burn_in: expected a nonnegative integer");
    burn_in = j["burn_in"].get<int>();
  }
  return ProcessSpec(ArmaSpec(std::move(ar), std::move(ma), sigma), burn_in);
}

Json spec_to_json(const ProcessSpec& spec) {
  Json j;
  auto lags = [](const VarPolynomial& poly) {
    auto arr = Json::array();
    for (const auto& c : poly.coeffs()) arr.push_back(matrix_to_json(c));
    return arr;
  };
  if (spec.arma().ar()) j["ar"] = lags(*spec.arma().ar());
  if (spec.arma().ma()) j["ma"] = lags(*spec.arma().ma());
  j["sigma"] = matrix_to_json(spec.arma().sigma_eps());
  j["burn_in"] = spec.burn_in();
  return j;
}

Json polynomial_to_json(const VarPolynomial& poly) {
  auto lags = Json::array();
  for (int t = 1; t <= poly.order(); ++t) {
    auto entries = Json::array();
    const auto& a = poly.coeff(t);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (a(i, k) != 0.0) entries.push_back({i, k, a(i, k)});
    lags.push_back({{"lag", t}, {"entries", std::move(entries)}});
  }
  return lags;
}

VarPolynomial polynomial_from_json(const Json& j, int p, int d) {
  if (!j.is_array()) throw InvalidArgument("coefficients: expected a list of lags");
  std::vector<Eigen::MatrixXd> coeffs(d, Eigen::MatrixXd::Zero(p, p));
  for (const auto& lag : j) {
    const int t = lag.at("lag").get<int>();
    if (t < 1 || t > d) throw InvalidArgument("coefficients: lag out of range");
    for (const auto& e : lag.at("entries")) {
      const int r = e.at(0).get<int>(), c = e.at(1).get<int>();
      if (r < 0 || r >= p || c < 0 || c >= p)
        throw InvalidArgument("coefficients: entry index out of range");
      coeffs[t - 1](r, c) = e.at(2).get<double>();
    }
  }
  return VarPolynomial(std::move(coeffs));
}

Json estimate_to_json(const VarEstimate& est) {
  Json j{{"method", to_string(est.method)},
         {"p", est.coeffs.dim()},
         {"d", est.coeffs.order()},
         {"lambda", est.lambda},
         {"converged", est.converged},
         {"kkt_residual", est.kkt_residual},
         {"iterations", est.iterations},
         {"coefficients", polynomial_to_json(est.coeffs)}};
  if (est.sigma_used) j["sigma_used"] = matrix_to_json(*est.sigma_used);
  return j;
}

Json stability_report_to_json(const StabilityReport& r) {
  Json ks = Json::object();
  for (const auto& [k, v] : r.k_sparse) ks[std::to_string(k)] = v;
  return {{"M", r.m_upper}, {"m", r.m_lower},      {"mu_min", r.mu_min},
          {"mu_max", r.mu_max}, {"grid_size", r.grid_size}, {"M_k", ks}};
}

std::string spectrum_to_csv(const std::vector<HermitianSpectrum>& spectrum) {
  std::string out = "theta,index,eigenvalue\n";
  for (const auto& s : spectrum) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(s.value);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      out += num(s.theta) + ',' + std::to_string(i) + ',' + num(ev(i)) + '\n';
  }
  return out;
}

Json to_json(const ReCertificate& c) {
  std::vector<double> w(c.worst_direction.data(), c.worst_direction.data() + c.worst_direction.size());
  return {{"alpha", c.alpha}, {"tau", c.tau},         {"violated", c.violated},
          {"min_value", c.min_value}, {"trials", c.trials}, {"worst_direction", w}};
}

Json to_json(const DeviationReport& r) {
  return {{"bound", r.bound}, {"frequency", r.frequency}, {"statistics", vec_json(r.statistics)}};
}

Json to_json(const CrossDeviationReport& r) {
  return {{"q95", r.q95}, {"rate", r.rate}, {"ratio", r.ratio},
          {"statistics", vec_json(r.statistics)}};
}

Json to_json(const SandwichReport& r) {
  Json j{{"n", r.n},
         {"lower", r.lower},
         {"upper", r.upper},
         {"eigen_min", r.eigen_min},
         {"eigen_max", r.eigen_max},
         {"slack", r.slack},
         {"passed", r.passed}};
  j["violating_eigenvalue"] = r.violating_eigenvalue ? Json(*r.violating_eigenvalue) : Json(nullptr);
  return j;
}

Json to_json(const RateAudit& a) {
  auto rows = Json::array();
  for (const auto& r : a.rows) {
    rows.push_back({{"n", r.n},
                    {"lambda", r.lambda},
                    {"l1_error", r.l1_error},
                    {"l2_error", r.l2_error},
                    {"prediction_error", r.prediction_error},
                    {"false_positives", r.false_positives},
                    {"l1_bound", r.l1_bound},
                    {"l2_bound", r.l2_bound},
                    {"prediction_bound", r.prediction_bound}});
  }
  return {{"k", a.k},
          {"alpha", a.alpha},
          {"mu_min_poly", a.mu_min_poly},
          {"mu_max_poly", a.mu_max_poly},
          {"mu_min_companion", a.mu_min_companion},
          {"rows", rows}};
}

Json to_json(const ConsistencyCurve& c) {
  auto pts = Json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"n", p.n},
                   {"threshold", p.threshold},
                   {"median_operator_error", p.median_operator_error},
                   {"median_frobenius_error", p.median_frobenius_error},
                   {"support_recovery", p.support_recovery}});
  }
  return {{"stability_m2", c.stability_m2}, {"constant", c.constant}, {"points", pts}};
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, v] : j.items()) {
    auto need_number = [&] {
      if (!v.is_number()) throw InvalidArgument(key + ": expected a number");
    };
    auto need_int = [&] {
      if (!v.is_number_integer()) throw InvalidArgument(key + ": expected an integer");
    };
    auto need_string = [&] {
      if (!v.is_string()) throw InvalidArgument(key + ": expected a string");
    };
    if (key == "experiment") { need_string(); cfg.experiment = v.get<std::string>(); }
    else if (key == "dims") cfg.dims = int_list(v, key);
    else if (key == "sample_sizes") cfg.sample_sizes = int_list(v, key);
    else if (key == "rescaled_sizes") cfg.rescaled_sizes = number_list(v, key);
    else if (key == "rhos") cfg.rhos = number_list(v, key);
    else if (key == "families") {
      if (!v.is_array()) throw InvalidArgument("families: expected an array of names");
      cfg.families.clear();
      for (const auto& f : v) {
        if (!f.is_string()) throw InvalidArgument("families: expected an array of names");
        try {
          cfg.families.push_back(cov_family_from_string(f.get<std::string>()));
        } catch (const InvalidArgument& e) {
          throw InvalidArgument(std::string("families: ") + e.what());
        }
      }
    }
    else if (key == "replicates") { need_int(); cfg.replicates = v.get<int>(); }
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InvalidArgument("seed: expected a nonnegative integer");
      cfg.seed = v.get<std::uint64_t>();
    }
    else if (key == "lambda_constant") { need_number(); cfg.lambda_constant = v.get<double>(); }
    else if (key == "output") { need_string(); cfg.output = v.get<std::string>(); }
    else if (key == "format") {
      need_string();
      cfg.format = v.get<std::string>();
      if (cfg.format != "csv" && cfg.format != "json")
        throw InvalidArgument("format: expected 'csv' or 'json'");
    }
    else if (key == "density") { need_number(); cfg.density = v.get<double>(); }
    else if (key == "transition_snr") { need_number(); cfg.transition_snr = v.get<double>(); }
    else if (key == "snr_reference") {
      need_string();
      cfg.snr_reference = v.get<std::string>();
      if (cfg.snr_reference != "error" && cfg.snr_reference != "identity")
        throw InvalidArgument("snr_reference: expected 'error' or 'identity'");
    }
    else if (key == "path_length") { need_int(); cfg.path_length = v.get<int>(); }
    else if (key == "path_ratio") { need_number(); cfg.path_ratio = v.get<double>(); }
    else if (key == "regression_snr") { need_number(); cfg.regression_snr = v.get<double>(); }
    else if (key == "ar2_alpha") { need_number(); cfg.ar2_alpha = v.get<double>(); }
    else if (key == "gammas") cfg.gammas = number_list(v, key);
    else if (key == "alphas") cfg.alphas = number_list(v, key);
    else if (key == "example1_alpha") { need_number(); cfg.example1_alpha = v.get<double>(); }
    else if (key == "standardize_predictors") {
      if (!v.is_boolean()) throw InvalidArgument(key + ": expected true or false");
      cfg.standardize_predictors = v.get<bool>();
    }
    else if (key == "example_sparsity") { need_int(); cfg.example_sparsity = v.get<int>(); }
    else if (key == "threads") { need_int(); cfg.threads = v.get<int>(); }
    else throw InvalidArgument("config: unknown field '" + key + "'");
  }
  if (cfg.replicates < 1) throw InvalidArgument("replicates: must be at least 1");
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> families;
  for (const auto f : cfg.families) families.push_back(to_string(f));
  return {{"experiment", cfg.experiment},
          {"dims", cfg.dims},
          {"sample_sizes", cfg.sample_sizes},
          {"rescaled_sizes", cfg.rescaled_sizes},
          {"rhos", cfg.rhos},
          {"families", families},
          {"replicates", cfg.replicates},
          {"seed", cfg.seed},
          {"lambda_constant", cfg.lambda_constant},
          {"output", cfg.output},
          {"format", cfg.format},
          {"density", cfg.density},
          {"transition_snr", cfg.transition_snr},
          {"snr_reference", cfg.snr_reference},
          {"path_length", cfg.path_length},
          {"path_ratio", cfg.path_ratio},
          {"regression_snr", cfg.regression_snr},
          {"ar2_alpha", cfg.ar2_alpha},
          {"gammas", cfg.gammas},
          {"alphas", cfg.alphas},
          {"example1_alpha", cfg.example1_alpha},
          {"standardize_predictors", cfg.standardize_predictors},
          {"example_sparsity", cfg.example_sparsity},
          {"threads", cfg.threads}};
}

}  // namespace sparsets
