#include "sparsets/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "sparsets/bench.hpp"
#include "sparsets/covthresh.hpp"
#include "sparsets/diagnostics.hpp"
#include "sparsets/error.hpp"
#include "sparsets/io.hpp"
#include "sparsets/spectral.hpp"
#include "sparsets/var.hpp"

namespace sparsets {

namespace {

struct SimulateArgs {
  std::string spec;
  int T = 0;
  std::uint64_t seed = 1;
  std::string out;
};

struct SpectraArgs {
  std::string spec;
  int grid = kDefaultGridSize;
  std::vector<int> ks;
  std::string out;
  std::string spectrum_out;
};

struct FitArgs {
  std::string data;
  std::string method = "l1ls";
  int d = 1;
  std::optional<double> lambda;
  std::optional<double> lambda_rule;
  std::string sigma;
  std::string out;
};

struct DiagnoseArgs {
  std::string check;
  std::string spec;
  std::string noise;
  std::string gram;
  std::uint64_t seed = 1;
  std::string out;
  int grid = kDefaultGridSize;
  int replicates = 200;
  int n = 100;
  std::vector<int> ns;
  int k = 1;
  double eta = 0.5;
  double alpha = 1.0;
  double tau = 0.0;
  int trials = 1000;
  double slack = 1e-4;
  double lambda_rule = 1.0;
  double constant = 2.0;
};

struct BenchArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return out.substr(0, dot) + suffix;
  return out + suffix;
}

void run_simulate(const SimulateArgs& a) {
  if (a.T < 1) throw InvalidArgument("--T: must be at least 1");
  const auto spec = spec_from_json(read_json(a.spec));
  const Eigen::MatrixXd data = simulate(spec, a.T, RngSeed{a.seed});
  write_matrix_csv(a.out, data);
  write_json(a.out + ".json",
             Json{{"T", a.T}, {"p", spec.dim()}, {"seed", a.seed}, {"spec", spec_to_json(spec)}});
}

void run_spectra(const SpectraArgs& a) {
  if (a.grid < 64) throw InvalidArgument("--grid: must be at least 64");
  const auto spec = spec_from_json(read_json(a.spec));
  const auto report = stability_measures(spec.arma(), a.grid, a.ks);
  write_or_print(a.out, stability_report_to_json(report).dump(2) + "\n");
  std::string spectrum_path = a.spectrum_out;
  if (spectrum_path.empty() && !a.out.empty() && a.out != "-")
    spectrum_path = sibling_path(a.out, ".spectrum.csv");
  if (!spectrum_path.empty())
    write_text(spectrum_path, spectrum_to_csv(spectrum_on_grid(spec.arma(), a.grid)));
}

void run_fit(const FitArgs& a) {
  const auto method = var_method_from_string(a.method);
  if (a.d < 1) throw InvalidArgument("--d: must be at least 1");
  const Eigen::MatrixXd data = read_matrix_csv(a.data);
  if (data.rows() <= a.d + 1) throw InvalidArgument("--data: too few rows for the lag order");
  const auto design = build_design(data, a.d);
  const double lambda = a.lambda ? *a.lambda : var_lambda_rule(design, a.lambda_rule.value_or(1.0));
  if (a.lambda && !(*a.lambda > 0.0)) throw InvalidArgument("--lambda: must be positive");

  std::optional<Eigen::MatrixXd> sigma;
  if (!a.sigma.empty()) {
    sigma = covariance_from_json(read_json(a.sigma));
    if (sigma->rows() != design.p || sigma->cols() != design.p)
      throw InvalidArgument("--sigma: expected a " + std::to_string(design.p) + " x " +
                            std::to_string(design.p) + " matrix");
  }

  const VarEstimate est = [&] {
    switch (method) {
      case VarMethod::L1LS:
        return fit_l1_ls(design, lambda);
      case VarMethod::L1LL:
        return sigma ? fit_l1_ll(design, lambda, *sigma) : fit_l1_ll_plugin(design, lambda);
      case VarMethod::L1LLOracle:
        if (!sigma) throw InvalidArgument("--sigma: required for method l1ll-oracle");
        return fit_l1_ll(design, lambda, *sigma, {}, VarMethod::L1LLOracle);
      case VarMethod::OLS:
        return fit_ols(design);
      case VarMethod::Ridge:
        break;
    }
    return a.lambda ? fit_ridge(design, *a.lambda) : fit_ridge_tuned(design);
  }();
  if (!est.converged) throw NumericalError("fit did not converge");
  write_or_print(a.out, estimate_to_json(est).dump(2) + "\n");
}

ProcessSpec load_spec(const std::string& path, const char* flag) {
  if (path.empty()) throw InvalidArgument(std::string(flag) + ": required for this check");
  return spec_from_json(read_json(path));
}

void run_diagnose(const DiagnoseArgs& a) {
  const RngSeed seed{a.seed, "diagnose/" + a.check};
  Json report;
  if (a.check == "re") {
    Eigen::MatrixXd gram;
    if (!a.gram.empty()) {
      gram = read_matrix_csv(a.gram);
    } else {
      const auto spec = load_spec(a.spec, "--spec or --gram");
      gram = arma_autocovariance(spec.arma(), 0)[0];
    }
    report = to_json(certify_re(gram, a.alpha, a.tau, a.trials, a.k, seed));
  } else if (a.check == "deviation") {
    const auto spec = load_spec(a.spec, "--spec");
    if (!a.noise.empty()) {
      const auto noise = load_spec(a.noise, "--noise");
      report = to_json(deviation_xe_mc(spec, noise, a.n, a.replicates, seed, a.grid));
    } else {
      if (a.k < 1 || a.k > spec.dim()) throw InvalidArgument("--k: must lie in [1, p]");
      Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.dim());
      v.head(a.k).setConstant(1.0 / std::sqrt(static_cast<double>(a.k)));
      report = to_json(deviation_mc(spec, a.n, v, a.eta, a.replicates, seed, a.grid));
    }
  } else if (a.check == "sandwich") {
    const auto spec = load_spec(a.spec, "--spec");
    report = to_json(toeplitz_sandwich_check(spec.arma(), a.n, a.grid, a.slack));
  } else if (a.check == "rate") {
    const auto spec = load_spec(a.spec, "--spec");
    if (!spec.arma().ar() || spec.arma().ma())
      throw InvalidArgument("--spec: the rate audit needs a pure VAR spec");
    if (a.ns.empty()) throw InvalidArgument("--ns: required for the rate audit");
    const VarInstance inst{*spec.arma().ar(), spec.arma().sigma_eps()};
    report = to_json(prop41_rate_audit(inst, a.ns, a.replicates, seed, a.lambda_rule, a.grid));
  } else if (a.check == "threshold") {
    const auto spec = load_spec(a.spec, "--spec");
    if (a.ns.empty()) throw InvalidArgument("--ns: required for the threshold check");
    const Eigen::MatrixXd truth = arma_autocovariance(spec.arma(), 0)[0];
    report = to_json(consistency_curve(spec, truth, a.ns, a.replicates, seed, a.constant, a.grid));
  }
  write_or_print(a.out, report.dump(2) + "\n");
}

void run_bench(const BenchArgs& a) {
  auto cfg = config_from_json(read_json(a.config));
  if (a.out) cfg.output = *a.out;
  if (a.format) cfg.format = *a.format;
  if (a.threads) cfg.threads = *a.threads;
  const auto result = run_experiment(cfg);
  emit(result, cfg.format == "json" ? EmitFormat::Json : EmitFormat::Csv, cfg.output);
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"Sparse high-dimensional time series estimation and diagnostics", "sparsets"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a sample path to CSV");
  simulate_cmd->add_option("--spec", sim.spec, "Process spec (JSON)")->required();
  simulate_cmd->add_option("--T", sim.T, "Number of time points")->required();
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--out", sim.out, "Output CSV; a .json sidecar is written next to it")
      ->required();

  SpectraArgs spec;
  auto* spectra_cmd = app.add_subcommand("spectra", "Stability measures and spectral density");
  spectra_cmd->add_option("--spec", spec.spec, "Process spec (JSON)")->required();
  spectra_cmd->add_option("--grid", spec.grid, "Frequency grid size");
  spectra_cmd->add_option("--k", spec.ks, "Sparsity levels for M(f, k)");
  spectra_cmd->add_option("--out", spec.out, "Stability report (JSON); '-' for stdout");
  spectra_cmd->add_option("--spectrum-out", spec.spectrum_out,
                          "Spectrum CSV (default: next to --out)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a VAR(d) to a CSV series");
  fit_cmd->add_option("--data", fit.data, "Series CSV, one time point per row")->required();
  fit_cmd->add_option("--method", fit.method, "l1ls, l1ll, l1ll-oracle, ols or ridge")
      ->check(CLI::IsMember({"l1ls", "l1ll", "l1ll-oracle", "ols", "ridge"}));
  fit_cmd->add_option("--d", fit.d, "Lag order");
  auto* lam = fit_cmd->add_option("--lambda", fit.lambda, "Penalty");
  auto* rule = fit_cmd->add_option("--lambda-rule", fit.lambda_rule,
                                   "Penalty c sqrt((log d + 2 log p) / N) with this c");
  lam->excludes(rule);
  rule->excludes(lam);
  fit_cmd->add_option("--sigma", fit.sigma, "Error covariance (JSON) for l1ll / l1ll-oracle");
  fit_cmd->add_option("--out", fit.out, "Estimate (JSON); '-' for stdout");

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Numerical checks of the estimation theory");
  diag_cmd->add_option("--check", diag.check, "re, deviation, sandwich, rate or threshold")
      ->required()
      ->check(CLI::IsMember({"re", "deviation", "sandwich", "rate", "threshold"}));
  diag_cmd->add_option("--spec", diag.spec, "Process spec (JSON)");
  diag_cmd->add_option("--noise", diag.noise, "Noise spec (JSON); deviation check of X'E/n");
  diag_cmd->add_option("--gram", diag.gram, "Gram matrix CSV for the re check");
  diag_cmd->add_option("--seed", diag.seed, "Random seed");
  diag_cmd->add_option("--out", diag.out, "Report (JSON); '-' for stdout");
  diag_cmd->add_option("--grid", diag.grid, "Frequency grid size");
  diag_cmd->add_option("--replicates", diag.replicates, "Monte Carlo replicates");
  diag_cmd->add_option("--n", diag.n, "Sample size (deviation) or block count (sandwich)");
  diag_cmd->add_option("--ns", diag.ns, "Sample sizes (rate, threshold)");
  diag_cmd->add_option("--k", diag.k, "Sparsity");
  diag_cmd->add_option("--eta", diag.eta, "Deviation level");
  diag_cmd->add_option("--alpha", diag.alpha, "RE curvature");
  diag_cmd->add_option("--tau", diag.tau, "RE tolerance");
  diag_cmd->add_option("--trials", diag.trials, "RE sampled directions");
  diag_cmd->add_option("--slack", diag.slack, "Sandwich slack");
  diag_cmd->add_option("--lambda-rule", diag.lambda_rule, "Penalty constant (rate)");
  diag_cmd->add_option("--constant", diag.constant, "Threshold constant M' (threshold)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a simulation experiment");
  bench_cmd->add_option("--config", bench.config, "Experiment config (JSON)")->required();
  bench_cmd->add_option("--out", bench.out, "Result table; overrides the config");
  bench_cmd->add_option("--format", bench.format, "csv or json; overrides the config")
      ->check(CLI::IsMember({"csv", "json"}));
  bench_cmd->add_option("--threads", bench.threads, "Worker threads; overrides the config");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*simulate_cmd) run_simulate(sim);
    else if (*spectra_cmd) run_spectra(spec);
    else if (*fit_cmd) run_fit(fit);
    else if (*diag_cmd) run_diagnose(diag);
    else if (*bench_cmd) run_bench(bench);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int parse_and_dispatch(int argc, const char* const* argv) {
  return parse_and_dispatch(std::vector<std::string>(argv, argv + argc));
}

}  // namespace sparsets
