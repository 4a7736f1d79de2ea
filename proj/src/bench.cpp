#include "sparsets/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sparsets/error.hpp"
#include "sparsets/linalg.hpp"
#include "sparsets/parallel.hpp"
#include "sparsets/solver.hpp"
#include "sparsets/var.hpp"

namespace sparsets {

namespace {

constexpr int kTransitionAttempts = 100;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void push(std::vector<ResultRow>& out, const std::string& exp, const std::string& setting,
          const std::string& method, int rep, const std::string& metric, double value) {
  out.push_back({exp, setting, method, rep, metric, value});
}

// Runs `body(r, rows)` for every replicate in parallel and concatenates the
// per-replicate rows in replicate order. Replicates that throw are reported
// on stderr and skipped.
template <class Body>
int run_replicates(int replicates, int threads, const std::string& setting, Body&& body,
                   ExperimentResult& result) {
  std::vector<std::vector<ResultRow>> slots(replicates);
  std::vector<char> failed(replicates, 0);
  std::mutex log_mutex;
  parallel_for(
      replicates,
      [&](int r) {
        try {
          body(r, slots[r]);
        } catch (const std::exception& e) {
          slots[r].clear();
          failed[r] = 1;
          std::lock_guard lock(log_mutex);
          std::cerr << "warning: " << setting << " replicate " << r << " skipped: " << e.what()
                    << '\n';
        }
      },
      threads);
  for (auto& rows : slots)
    for (auto& row : rows) result.append(std::move(row));
  return static_cast<int>(std::count(failed.begin(), failed.end(), 1));
}

// Redraws the support until the SNR target is reachable under the radius cap.
VarPolynomial draw_transition(const ExperimentConfig& cfg, int p, const Eigen::MatrixXd& sigma,
                              const RngSeed& seed) {
  const Eigen::MatrixXd reference =
      cfg.snr_reference == "identity" ? Eigen::MatrixXd::Identity(p, p) : sigma;
  for (int attempt = 0;; ++attempt) {
    try {
      return gen_sparse_transition(p, cfg.density, std::sqrt(cfg.transition_snr),
                                   seed.derive("transition", attempt), reference);
    } catch (const NumericalError&) {
      if (attempt + 1 >= kTransitionAttempts) throw;
    }
  }
}

// Rescales a VAR(1) to unit marginal variances: D^{-1/2} X is again a VAR(1)
// with transition D^{-1/2} A D^{1/2} and innovation covariance D^{-1/2} S D^{-1/2}.
ProcessSpec standardized(const ProcessSpec& spec) {
  const auto& arma = spec.arma();
  const auto& a = arma.ar()->coeff(1);
  const Eigen::VectorXd sd =
      var_autocovariance(*arma.ar(), arma.sigma_eps(), 0)[0].diagonal().cwiseSqrt();
  const Eigen::MatrixXd at = sd.cwiseInverse().asDiagonal() * a * sd.asDiagonal();
  const Eigen::MatrixXd st =
      sd.cwiseInverse().asDiagonal() * arma.sigma_eps() * sd.cwiseInverse().asDiagonal();
  return ProcessSpec(ArmaSpec::var(VarPolynomial({at}), 0.5 * (st + st.transpose())),
                     spec.burn_in());
}

void require_replicates(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw InvalidArgument("replicates must be at least 1");
}

}  // namespace

void ExperimentResult::append(const ExperimentResult& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

void ExperimentResult::sort() {
  std::stable_sort(rows_.begin(), rows_.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.setting != b.setting) return a.setting < b.setting;
    if (a.method != b.method) return a.method < b.method;
    return a.replicate < b.replicate;
  });
}

std::vector<double> ExperimentResult::values(const std::string& setting, const std::string& method,
                                             const std::string& metric) const {
  std::vector<std::pair<int, double>> hits;
  for (const auto& r : rows_)
    if (r.setting == setting && r.method == method && r.metric == metric)
      hits.emplace_back(r.replicate, r.value);
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

std::vector<std::string> ExperimentResult::settings() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows_)
    if (seen.insert(r.setting).second) out.push_back(r.setting);
  return out;
}

ExperimentConfig with_defaults(ExperimentConfig cfg) {
  if (cfg.experiment == "scaling") {
    if (cfg.dims.empty()) cfg.dims = {64, 128, 256};
    if (cfg.sample_sizes.empty() && cfg.rescaled_sizes.empty())
      cfg.rescaled_sizes = {10, 15, 20};
  } else if (cfg.experiment == "var") {
    if (cfg.dims.empty()) cfg.dims = {10};
    if (cfg.sample_sizes.empty()) cfg.sample_sizes = {30, 50};
    if (cfg.rhos.empty()) cfg.rhos = {0.5, 0.7, 0.9};
    if (cfg.families.empty())
      cfg.families = {CovFamily::BlockI, CovFamily::BlockII, CovFamily::Toeplitz};
  } else if (cfg.experiment == "dependence") {
    if (cfg.dims.empty()) cfg.dims = {200};
    if (cfg.sample_sizes.empty()) cfg.sample_sizes = {200, 400, 800, 1600, 3200};
    if (cfg.gammas.empty()) cfg.gammas = {0.0, 0.3, 0.35, 0.4};
    if (cfg.alphas.empty()) cfg.alphas = {0.2, 0.4, 0.6, 0.8};
  } else {
    throw InvalidArgument("experiment: unknown id '" + cfg.experiment +
                          "' (expected scaling, var or dependence)");
  }
  return cfg;
}

ExperimentResult run_scaling_experiment(const ExperimentConfig& raw) {
  const auto cfg = with_defaults(raw);
  require_replicates(cfg);
  ExperimentResult result;
  const RngSeed root{cfg.seed, "scaling"};
  for (const int p : cfg.dims) {
    if (p < 2) throw InvalidArgument("dims: need p >= 2");
    const int k = std::max(1, static_cast<int>(std::lround(std::sqrt(p))));
    const double klogp = k * std::log(static_cast<double>(p));
    std::vector<int> ns;
    for (const double s : cfg.rescaled_sizes) ns.push_back(static_cast<int>(std::lround(s * klogp)));
    for (const int n : cfg.sample_sizes) ns.push_back(n);

    const auto predictors = example2_predictor_spec(p, cfg.ar2_alpha);
    const auto noise = ma2_noise_spec();
    const Eigen::MatrixXd gx = Eigen::MatrixXd::Identity(p, p);
    for (const int n : ns) {
      if (n < 2) throw InvalidArgument("sample_sizes: need n >= 2");
      const std::string setting = "p=" + std::to_string(p) + ";n=" + std::to_string(n);
      const double lambda = LambdaRule{cfg.lambda_constant, n, static_cast<double>(p)}.value();
      const int failures = run_replicates(
          cfg.replicates, cfg.threads, setting,
          [&](int r, std::vector<ResultRow>& rows) {
            const auto seed = root.derive(setting).derive("rep", r);
            CounterRng rng(seed.derive("beta"));
            const double mag = 1.0 / std::sqrt(static_cast<double>(k));
            const RegressionScenario scn(random_sparse_vector(p, k, mag, mag, rng), predictors,
                                         noise, cfg.regression_snr, gx);
            const auto sample = simulate_regression(scn, n, seed.derive("data"));
            const auto fit = lasso_regression(sample.x, sample.y, lambda);
            const double err = (fit.beta_hat - scn.beta_star()).norm();
            push(rows, "scaling", setting, "lasso", r, "l2_error", err);
            push(rows, "scaling", setting, "lasso", r, "n", n);
            push(rows, "scaling", setting, "lasso", r, "rescaled_n", n / klogp);
          },
          result);
      if (failures > 0) result.append({"scaling", setting, "lasso", -1, "failures", double(failures)});
    }
  }
  result.sort();
  return result;
}

ExperimentResult run_var_benchmark(const ExperimentConfig& raw) {
  const auto cfg = with_defaults(raw);
  require_replicates(cfg);
  ExperimentResult result;
  const RngSeed root{cfg.seed, "var"};
  for (const int p : cfg.dims)
    for (const int T : cfg.sample_sizes)
      for (const auto family : cfg.families)
        for (const double rho : cfg.rhos) {
          if (T < 3) throw InvalidArgument("sample_sizes: need T >= 3");
          const std::string setting = "p=" + std::to_string(p) + ";T=" + std::to_string(T) +
                                      ";family=" + to_string(family) + ";rho=" + fmt(rho);
          const Eigen::MatrixXd sigma = build_error_cov({family, rho, p});
          const int failures = run_replicates(
              cfg.replicates, cfg.threads, setting,
              [&](int r, std::vector<ResultRow>& rows) {
                const auto seed = root.derive(setting).derive("rep", r);
                const auto a = draw_transition(cfg, p, sigma, seed);
                const ProcessSpec spec(ArmaSpec::var(a, sigma));
                const auto design = build_design(simulate(spec, T, seed.derive("data")), 1);
                const auto truth = support_of(a);
                const double lam = var_lambda_rule(design, cfg.lambda_constant);

                auto record = [&](const std::string& method, double auc, const VarEstimate& est) {
                  push(rows, "var", setting, method, r, "auroc", auc);
                  push(rows, "var", setting, method, r, "relative_error",
                       relative_error(est.coeffs, a));
                };
                auto magnitude_auc = [&](const VarEstimate& est) {
                  const Eigen::VectorXd s = stack_coefficients(est.coeffs).cwiseAbs();
                  return auroc(std::span<const double>(s.data(), s.size()), truth);
                };
                auto path_auc = [&](const Eigen::MatrixXd& weight) {
                  const auto prob = var_problem(design, weight, 0.0);
                  const auto grid =
                      log_lambda_grid(lambda_max(prob.linear), cfg.path_ratio, cfg.path_length);
                  return auroc_from_path(fit_path(design, weight, grid), truth);
                };

                const auto ols = fit_ols(design);
                record("ols", magnitude_auc(ols), ols);
                const auto ridge = fit_ridge_tuned(design);
                record("ridge", magnitude_auc(ridge), ridge);

                const auto ls = fit_l1_ls(design, lam);
                record("l1ls", path_auc(Eigen::MatrixXd::Identity(p, p)), ls);

                const Eigen::MatrixXd sigma_hat = estimate_sigma_from_residuals(design, ls);
                const auto ll = fit_l1_ll(design, lam, sigma_hat, {}, VarMethod::L1LL);
                record("l1ll", path_auc(solve_spd(sigma_hat, Eigen::MatrixXd::Identity(p, p))), ll);

                const auto oracle = fit_l1_ll(design, lam, sigma, {}, VarMethod::L1LLOracle);
                record("l1ll-oracle", path_auc(solve_spd(sigma, Eigen::MatrixXd::Identity(p, p))),
                       oracle);
              },
              result);
          result.append({"var", setting, "all", -1, "failures", double(failures)});
        }
  result.sort();
  return result;
}

ExperimentResult run_dependence_examples(const ExperimentConfig& raw) {
  const auto cfg = with_defaults(raw);
  require_replicates(cfg);
  ExperimentResult result;
  const RngSeed root{cfg.seed, "dependence"};
  const auto noise = ProcessSpec(ArmaSpec::white_noise(Eigen::MatrixXd::Identity(1, 1)));

  auto run_family = [&](int example, const std::string& param, double value, int p,
                        const ProcessSpec& predictors) {
    const int k = cfg.example_sparsity > 0
                      ? cfg.example_sparsity
                      : std::max(1, static_cast<int>(std::lround(std::sqrt(p))));
    for (const int n : cfg.sample_sizes) {
      const std::string setting = "example=" + std::to_string(example) +
                                  ";p=" + std::to_string(p) + ";n=" + std::to_string(n) + ";" +
                                  param + "=" + fmt(value);
      const double lambda = LambdaRule{cfg.lambda_constant, n, static_cast<double>(p)}.value();
      const int failures = run_replicates(
          cfg.replicates, cfg.threads, setting,
          [&](int r, std::vector<ResultRow>& rows) {
            // The coefficient vector and noise depend only on (p, n, replicate), so
            // curves for different dependence levels are paired.
            const std::string pair_key = "p=" + std::to_string(p) + ";n=" + std::to_string(n);
            const auto seed = root.derive(pair_key).derive("rep", r);
            CounterRng rng(seed.derive("beta"));
            const RegressionScenario scn(random_sparse_vector(p, k, 1.0, 1.0, rng), predictors,
                                         noise, std::nullopt);
            const auto sample = simulate_regression(scn, n, seed.derive("data"));
            const auto fit = lasso_regression(sample.x, sample.y, lambda);
            push(rows, "dependence", setting, "lasso", r, "l2_error",
                 (fit.beta_hat - scn.beta_star()).norm());
          },
          result);
      if (failures > 0)
        result.append({"dependence", setting, "lasso", -1, "failures", double(failures)});
    }
  };

  for (const int p : cfg.dims) {
    for (const double g : cfg.gammas) {
      const auto spec = example1_predictor_spec(p, cfg.example1_alpha, g);
      run_family(1, "gamma", g, p, cfg.standardize_predictors ? standardized(spec) : spec);
    }
    for (const double a : cfg.alphas) run_family(2, "alpha", a, p, example2_predictor_spec(p, a));
  }
  result.sort();
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "scaling") return run_scaling_experiment(cfg);
  if (cfg.experiment == "var") return run_var_benchmark(cfg);
  if (cfg.experiment == "dependence") return run_dependence_examples(cfg);
  throw InvalidArgument("experiment: unknown id '" + cfg.experiment + "'");
}

std::string to_csv(const ExperimentResult& result) {
  std::string out = "experiment,setting,method,replicate,metric,value\n";
  for (const auto& r : result.rows()) {
    out += r.experiment + ',' + r.setting + ',' + r.method + ',' + std::to_string(r.replicate) +
           ',' + r.metric + ',' + fmt17(r.value) + '\n';
  }
  return out;
}

std::string to_json_text(const ExperimentResult& result) {
  auto arr = nlohmann::json::array();
  for (const auto& r : result.rows()) {
    arr.push_back({{"experiment", r.experiment},
                   {"setting", r.setting},
                   {"method", r.method},
                   {"replicate", r.replicate},
                   {"metric", r.metric},
                   {"value", r.value}});
  }
  return arr.dump(2) + "\n";
}

ExperimentResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "experiment,setting,method,replicate,metric,value")
    throw InvalidArgument("result CSV: missing or malformed header");
  ExperimentResult result;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6)
      throw InvalidArgument("result CSV line " + std::to_string(lineno) + ": expected 6 fields");
    ResultRow row{f[0], f[1], f[2], 0, f[4], 0.0};
    try {
      row.replicate = std::stoi(f[3]);
      row.value = std::strtod(f[5].c_str(), nullptr);
    } catch (const std::exception&) {
      throw InvalidArgument("result CSV line " + std::to_string(lineno) + ": bad replicate");
    }
    result.append(std::move(row));
  }
  return result;
}

void emit(const ExperimentResult& result, EmitFormat format, const std::string& path) {
  ExperimentResult sorted = result;
  sorted.sort();
  const std::string text = format == EmitFormat::Csv ? to_csv(sorted) : to_json_text(sorted);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace sparsets
