#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "underreport/csv.hpp"
#include "underreport/effects.hpp"
#include "underreport/estimator.hpp"
#include "underreport/json_io.hpp"
#include "underreport/synthlab.hpp"
#include "underreport/version.hpp"

namespace ur = underreport;

namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

// "start:stop:count" with inclusive endpoints, or an explicit comma list
std::vector<double> parse_grid(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    auto parts = split_commas(spec);
    if (parts.size() != 1) {
      throw std::invalid_argument("grid '" + spec +
                                  "' mixes ':' and ',' forms");
    }
    double start = 0, stop = 0;
    long count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3) {
      throw std::invalid_argument("grid '" + spec +
                                  "' does not parse as start:stop:count");
    }
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    if (count == 1) {
      if (start != stop) {
        throw std::invalid_argument(
            "grid with count 1 needs start == stop");
      }
      return {start};
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      grid[static_cast<std::size_t>(i)] =
          start + (stop - start) * static_cast<double>(i) /
                      static_cast<double>(count - 1);
    }
    return grid;
  }
  std::vector<double> grid;
  for (const auto& cell : split_commas(spec)) {
    try {
      std::size_t used = 0;
      double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      grid.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid value '" + cell +
                                  "' is not a number");
    }
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

ur::FitMode parse_mode(const std::string& mode) {
  if (mode == "known-tau") return ur::FitMode::KnownTau;
  if (mode == "single") return ur::FitMode::SingleObs;
  if (mode == "dual") return ur::FitMode::DualObs;
  throw std::invalid_argument("unknown --mode '" + mode +
                              "' (expected known-tau, single, or dual)");
}

const char* mode_name(ur::FitMode mode) {
  switch (mode) {
    case ur::FitMode::KnownTau: return "known-tau";
    case ur::FitMode::SingleObs: return "single";
    case ur::FitMode::DualObs: return "dual";
  }
  return "?";
}

struct Standardization {
  std::vector<double> means, sds;
};

Standardization standardize_columns(ur::Matrix& x,
                                    const std::vector<std::string>& names) {
  Standardization out;
  const auto n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double mean = x.col(j).mean();
    double var = (x.col(j).array() - mean).square().sum() /
                 std::max(n - 1.0, 1.0);
    double sd = std::sqrt(var);
    if (!(sd > 0.0)) {
      throw std::invalid_argument(
          "--standardize: column '" + names[static_cast<std::size_t>(j)] +
          "' has zero variance");
    }
    x.col(j) = (x.col(j).array() - mean) / sd;
    out.means.push_back(mean);
    out.sds.push_back(sd);
  }
  return out;
}

// flags shared by fit and sweep
struct EstimationFlags {
  std::string csv_path;
  std::string mode_str = "single";
  double tau = 0.0;
  bool tau_given = false;
  std::string link_propensity = "logit";
  std::string link_outcome = "logit";
  int restarts = 5;
  int max_iterations = 500;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
  bool standardize = false;
  int bootstrap = 0;
  double ci_level = 0.95;
  std::string covariates;  // comma list, empty = infer from header
};

void add_estimation_flags(CLI::App* cmd, EstimationFlags& f, bool with_mode) {
  cmd->add_option("csv", f.csv_path, "input CSV path")->required();
  if (with_mode) {
    cmd->add_option("--mode", f.mode_str,
                    "fitting regime: known-tau, single, dual");
    cmd->add_option("--tau", f.tau,
                    "underreporting rate (required with --mode known-tau)");
  }
  cmd->add_option("--link-propensity", f.link_propensity,
                  "propensity link: logit, probit, cloglog");
  cmd->add_option("--link-outcome", f.link_outcome,
                  "outcome link: logit, probit, cloglog");
  cmd->add_option("--restarts", f.restarts, "optimizer restarts");
  cmd->add_option("--max-iter", f.max_iterations, "optimizer iteration cap");
  cmd->add_option("--grad-tol", f.grad_tol,
                  "gradient infinity-norm tolerance");
  cmd->add_option("--seed", f.seed, "seed for all stochastic work");
  cmd->add_flag("--standardize", f.standardize,
                "z-score covariates before fitting");
  cmd->add_option("--bootstrap", f.bootstrap,
                  "bootstrap replicates for confidence intervals (0 = off)");
  cmd->add_option("--ci", f.ci_level, "confidence level for intervals");
  cmd->add_option("--covariates", f.covariates,
                  "comma list of covariate columns (default: all non-reserved)");
}

ur::FitConfig to_fit_config(const EstimationFlags& f, ur::FitMode mode) {
  ur::FitConfig config;
  config.mode = mode;
  config.known_tau = f.tau;
  config.link_propensity = ur::parse_link(f.link_propensity);
  config.link_outcome = ur::parse_link(f.link_outcome);
  config.restarts = f.restarts;
  config.max_iterations = f.max_iterations;
  config.grad_tol = f.grad_tol;
  config.seed = f.seed;
  return config;
}

struct LoadedTable {
  ur::InputTable table;
  std::optional<Standardization> standardization;
};

LoadedTable load_table(const EstimationFlags& f) {
  std::vector<std::string> override_names;
  if (!f.covariates.empty()) override_names = split_commas(f.covariates);
  LoadedTable loaded;
  loaded.table = ur::read_input_csv(f.csv_path, override_names);
  if (f.standardize) {
    loaded.standardization = standardize_columns(
        loaded.table.data.x, loaded.table.covariate_names);
  }
  return loaded;
}

ur::Json weights_json(const ur::Vector& w,
                      const std::vector<std::string>& names) {
  ur::Json out = ur::Json::object();
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    out[names[static_cast<std::size_t>(j)]] = w[j];
  }
  return out;
}

ur::Json params_json(const ur::FullParams& p,
                     const std::vector<std::string>& names) {
  ur::Json out;
  out["tau"] = p.error.tau1;
  if (p.error.tau2) out["tau2"] = *p.error.tau2;
  out["phi"] = {{"intercept", p.propensity.intercept},
                {"weights", weights_json(p.propensity.weights, names)},
                {"link", ur::link_name(p.propensity.link)}};
  out["theta"] = {{"intercept", p.outcome.intercept},
                  {"weights", weights_json(p.outcome.weights, names)},
                  {"exposure_coef", p.outcome.exposure_coef},
                  {"link", ur::link_name(p.outcome.link)}};
  return out;
}

ur::Json diagnostics_json(const ur::FitResult& r) {
  return {{"converged", r.converged},
          {"gradient_norm", r.gradient_norm},
          {"n_restarts_agreeing", r.n_restarts_agreeing},
          {"boundary_suspect", r.boundary_suspect},
          {"restart_final_loglik", r.restart_final_loglik},
          {"warnings", r.warnings}};
}

ur::Json intervals_json(const ur::BootstrapResult& b) {
  ur::Json rows = ur::Json::array();
  for (const auto& iv : b.intervals) {
    rows.push_back({{"name", iv.name},
                    {"point", iv.point},
                    {"lower", iv.lower},
                    {"upper", iv.upper}});
  }
  return {{"replicates", b.replicates},
          {"n_failed", b.n_failed},
          {"ci_level", b.ci_level},
          {"intervals", rows}};
}

ur::Json config_echo(const EstimationFlags& f, ur::FitMode mode) {
  ur::Json out;
  out["mode"] = mode_name(mode);
  if (mode == ur::FitMode::KnownTau) out["tau"] = f.tau;
  out["link_propensity"] = f.link_propensity;
  out["link_outcome"] = f.link_outcome;
  out["restarts"] = f.restarts;
  out["max_iterations"] = f.max_iterations;
  out["grad_tol"] = f.grad_tol;
  out["seed"] = f.seed;
  out["standardize"] = f.standardize;
  out["bootstrap"] = f.bootstrap;
  out["ci_level"] = f.ci_level;
  if (!f.covariates.empty()) out["covariates"] = f.covariates;
  return out;
}

ur::Json input_json(const std::string& path, const ur::InputTable& table) {
  return {{"path", path},
          {"n_rows", table.data.n_rows()},
          {"n_covariates", table.data.n_covariates()},
          {"covariates", table.covariate_names},
          {"dual", table.data.dual()}};
}

ur::Json standardization_json(const Standardization& s,
                              const std::vector<std::string>& names) {
  ur::Json means = ur::Json::object(), sds = ur::Json::object();
  for (std::size_t j = 0; j < names.size(); ++j) {
    means[names[j]] = s.means[j];
    sds[names[j]] = s.sds[j];
  }
  return {{"means", means}, {"sds", sds}};
}

void deliver_record(const ur::Json& record, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << ur::dump_json_17(record);
  } else {
    ur::write_file_atomic(out_path, ur::dump_json_17(record));
  }
}

int run_fit(const EstimationFlags& flags, const std::string& out_path) {
  ur::FitMode mode = parse_mode(flags.mode_str);
  if (mode == ur::FitMode::KnownTau && !flags.tau_given) {
    std::cerr << "fit: --tau is required with --mode known-tau\n";
    return 1;
  }
  if (mode != ur::FitMode::KnownTau && flags.tau_given) {
    std::cerr << "fit: --tau only applies to --mode known-tau\n";
    return 1;
  }
  LoadedTable loaded = load_table(flags);
  const ur::Dataset& data = loaded.table.data;
  if (mode == ur::FitMode::DualObs && !data.dual()) {
    std::cerr << "fit: --mode dual requires an a_obs2 column, none found in "
              << flags.csv_path << "\n";
    return 1;
  }
  ur::FitConfig config = to_fit_config(flags, mode);

  ur::FitResult point = ur::fit(data, config);
  bool bootstrap_failed = false;
  std::optional<ur::BootstrapResult> boot;
  std::string bootstrap_error;
  if (flags.bootstrap > 0) {
    try {
      boot = ur::bootstrap(data, config, flags.bootstrap, flags.ci_level,
                           flags.seed, &point);
    } catch (const std::runtime_error& e) {
      bootstrap_failed = true;
      bootstrap_error = e.what();
    }
  }

  ur::Json record;
  record["command"] = "fit";
  record["version"] = ur::kVersion;
  record["input"] = input_json(flags.csv_path, loaded.table);
  record["config"] = config_echo(flags, mode);
  if (loaded.standardization) {
    record["standardization"] = standardization_json(
        *loaded.standardization, loaded.table.covariate_names);
  }
  record["params"] = params_json(point.params, loaded.table.covariate_names);
  record["log_likelihood"] = point.log_likelihood_at_opt;
  record["diagnostics"] = diagnostics_json(point);
  ur::Json estimands;
  estimands["risk_difference"] = ur::risk_difference(point.params.outcome, data);
  if (config.link_outcome == ur::Link::Logit) {
    estimands["odds_ratio"] = ur::adjusted_odds_ratio(point.params.outcome);
  }
  record["estimands"] = estimands;
  if (boot) record["bootstrap"] = intervals_json(*boot);
  if (bootstrap_failed) {
    record["bootstrap"] = {{"error", bootstrap_error}};
  }
  deliver_record(record, out_path);
  return point.converged && !bootstrap_failed ? 0 : 2;
}

int run_simulate(const ur::SynthConfig& config, const std::string& out_path,
                 bool emit_truth) {
  ur::SynthDraw draw = ur::generate(config);
  ur::write_file_atomic(
      out_path,
      ur::format_dataset_csv(draw.data, emit_truth ? &draw.a_true : nullptr));

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < config.d; ++j) {
    names.push_back("x" + std::to_string(j + 1));
  }
  ur::Json truth;
  truth["command"] = "simulate";
  truth["version"] = ur::kVersion;
  ur::Json cfg;
  cfg["n"] = config.n;
  cfg["d"] = config.d;
  cfg["tau"] = config.tau;
  if (config.tau2) cfg["tau2"] = *config.tau2;
  cfg["theta_a"] = config.theta_a;
  cfg["phi_scale"] = config.phi_scale;
  if (config.propensity_saturation) {
    cfg["propensity_saturation"] = *config.propensity_saturation;
  }
  cfg["seed"] = config.seed;
  cfg["emit_truth_column"] = emit_truth;
  truth["config"] = cfg;
  truth["true_params"] = params_json(draw.true_params, names);
  truth["true_rd"] = draw.true_rd;
  ur::write_json_atomic(out_path + ".truth.json", truth);
  return 0;
}

int run_sweep(const EstimationFlags& flags, const std::string& grid_spec,
              const std::string& out_path, const std::string& record_path) {
  std::vector<double> grid = parse_grid(grid_spec);
  LoadedTable loaded = load_table(flags);
  ur::FitConfig config = to_fit_config(flags, ur::FitMode::KnownTau);
  ur::SweepOptions options;
  options.bootstrap_replicates = flags.bootstrap;
  options.ci_level = flags.ci_level;
  ur::SensitivityBand band =
      ur::sensitivity_sweep(loaded.table.data, config, grid, options);

  std::string csv = "tau,rd,ci_lo,ci_hi,converged\n";
  bool all_converged = true;
  for (std::size_t i = 0; i < band.tau_grid.size(); ++i) {
    double lo = band.ci_lower.empty() ? std::nan("") : band.ci_lower[i];
    double hi = band.ci_upper.empty() ? std::nan("") : band.ci_upper[i];
    csv += format17(band.tau_grid[i]) + "," + format17(band.rd_estimates[i]) +
           "," + format17(lo) + "," + format17(hi) + "," +
           (band.converged[i] ? "1" : "0") + "\n";
    all_converged = all_converged && band.converged[i];
  }
  ur::write_file_atomic(out_path, csv);

  ur::Json record;
  record["command"] = "sweep";
  record["version"] = ur::kVersion;
  record["input"] = input_json(flags.csv_path, loaded.table);
  ur::Json cfg = config_echo(flags, ur::FitMode::KnownTau);
  cfg.erase("mode");
  cfg.erase("tau");
  cfg["tau_grid"] = grid_spec;
  record["config"] = cfg;
  if (loaded.standardization) {
    record["standardization"] = standardization_json(
        *loaded.standardization, loaded.table.covariate_names);
  }
  ur::Json points = ur::Json::array();
  for (std::size_t i = 0; i < band.tau_grid.size(); ++i) {
    ur::Json point;
    point["tau"] = band.tau_grid[i];
    point["rd"] = band.rd_estimates[i];
    if (!band.ci_lower.empty()) {
      point["ci_lo"] = band.ci_lower[i];
      point["ci_hi"] = band.ci_upper[i];
    }
    point["converged"] = band.converged[i] != 0;
    points.push_back(point);
  }
  record["band"] = points;
  record["band_csv"] = out_path;
  deliver_record(record, record_path.empty() ? out_path + ".run.json"
                                             : record_path);
  return all_converged ? 0 : 2;
}

int run_experiment(const std::string& axis_str, const std::string& grid_spec,
                   int replicates, const ur::SynthConfig& base,
                   const ur::FitConfig& fit_config, std::uint64_t seed,
                   const std::string& out_prefix) {
  ur::ExperimentAxis axis;
  if (axis_str == "tau") {
    axis = ur::ExperimentAxis::TauSweep;
  } else if (axis_str == "size") {
    axis = ur::ExperimentAxis::SizeSweep;
  } else if (axis_str == "mi") {
    axis = ur::ExperimentAxis::MiSweep;
  } else {
    throw std::invalid_argument("unknown --axis '" + axis_str +
                                "' (expected tau, size, or mi)");
  }
  std::vector<double> grid = parse_grid(grid_spec);
  ur::ExperimentReport report =
      ur::run_experiment(axis, grid, base, replicates, fit_config, seed);

  std::string csv = "grid_value,mse_adjusted,mse_unadjusted,n_failed\n";
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    csv += format17(report.grid[g]) + "," + format17(report.mse_adjusted[g]) +
           "," + format17(report.mse_unadjusted[g]) + "," +
           std::to_string(report.n_failed[g]) + "\n";
  }
  ur::write_file_atomic(out_prefix + ".csv", csv);

  ur::Json record;
  record["command"] = "experiment";
  record["version"] = ur::kVersion;
  record["axis"] = axis_str;
  record["grid"] = report.grid;
  record["replicates"] = report.replicates;
  ur::Json cfg;
  cfg["n"] = base.n;
  cfg["d"] = base.d;
  cfg["tau"] = base.tau;
  cfg["theta_a"] = base.theta_a;
  cfg["phi_scale"] = base.phi_scale;
  cfg["seed"] = seed;
  cfg["restarts"] = fit_config.restarts;
  cfg["max_iterations"] = fit_config.max_iterations;
  cfg["grad_tol"] = fit_config.grad_tol;
  record["config"] = cfg;
  record["mse_adjusted"] = report.mse_adjusted;
  record["mse_unadjusted"] = report.mse_unadjusted;
  record["n_failed"] = report.n_failed;
  ur::Json flagged = ur::Json::array();
  for (char f : report.flagged) flagged.push_back(f != 0);
  record["flagged"] = flagged;
  if (!report.mi_measured.empty()) record["mi_measured"] = report.mi_measured;
  record["true_rd_per_replicate"] = report.true_rd_per_replicate;
  ur::write_json_atomic(out_prefix + ".json", record);
  return 0;
}

int run_mi(const std::string& csv_path, const std::string& target,
           const std::string& covariates, const std::string& out_path) {
  std::vector<std::string> override_names;
  if (!covariates.empty()) override_names = split_commas(covariates);
  ur::InputTable table = ur::read_input_csv(csv_path, override_names);
  ur::MiTarget mi_target;
  if (target == "a_obs") {
    mi_target = ur::MiTarget::ObsExposure;
  } else if (target == "a_obs2") {
    mi_target = ur::MiTarget::ObsExposure2;
  } else {
    throw std::invalid_argument("unknown --target '" + target +
                                "' (expected a_obs or a_obs2)");
  }
  if (mi_target == ur::MiTarget::ObsExposure2 && !table.data.dual()) {
    std::cerr << "mi: column 'a_obs2' not present in " << csv_path << "\n";
    return 1;
  }
  bool degenerate = false;
  double mi = ur::mutual_information(table.data, mi_target, &degenerate);
  std::printf("%.6f\n", mi);
  if (degenerate) {
    std::cerr << "warning: target column is constant; mutual information "
                 "defaulted to 0\n";
  }
  if (!out_path.empty()) {
    ur::Json record;
    record["command"] = "mi";
    record["version"] = ur::kVersion;
    record["input"] = input_json(csv_path, table);
    record["target"] = target;
    record["mi_nats"] = mi;
    record["degenerate"] = degenerate;
    ur::write_json_atomic(out_path, record);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outcome-model estimation under a strictly underreported "
               "binary exposure"};
  app.set_version_flag("--version", ur::kVersion);
  app.require_subcommand(1);

  EstimationFlags fit_flags;
  std::string fit_out;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "maximum-likelihood fit of the exposure/outcome model");
  add_estimation_flags(fit_cmd, fit_flags, true);
  fit_cmd->add_option("--out", fit_out, "run-record path (default: stdout)");

  ur::SynthConfig synth;
  double synth_tau2 = 0.0, synth_saturation = 0.0;
  std::string synth_out;
  bool emit_truth = false;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "draw a synthetic dataset");
  sim_cmd->add_option("--n", synth.n, "rows")->required();
  sim_cmd->add_option("--d", synth.d, "covariate count");
  sim_cmd->add_option("--tau", synth.tau, "underreporting rate");
  CLI::Option* tau2_opt =
      sim_cmd->add_option("--tau2", synth_tau2,
                          "second report's underreporting rate (dual data)");
  sim_cmd->add_option("--theta-a", synth.theta_a, "true exposure coefficient");
  sim_cmd->add_option("--phi-scale", synth.phi_scale,
                      "scale on propensity weights");
  CLI::Option* sat_opt = sim_cmd->add_option(
      "--propensity-saturation", synth_saturation,
      "ceiling alpha for a scaled-logistic propensity (misspecified data)");
  sim_cmd->add_option("--seed", synth.seed, "generator seed");
  sim_cmd->add_option("--out", synth_out, "output CSV path")->required();
  sim_cmd->add_flag("--emit-truth-column", emit_truth,
                    "include the latent exposure as column a_true");

  EstimationFlags sweep_flags;
  std::string sweep_grid, sweep_out, sweep_record;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "risk-difference band over a grid of fixed error rates");
  add_estimation_flags(sweep_cmd, sweep_flags, false);
  sweep_cmd->add_option("--tau-grid", sweep_grid,
                        "grid: start:stop:count or comma list")
      ->required();
  sweep_cmd->add_option("--out", sweep_out, "band CSV path")->required();
  sweep_cmd->add_option("--record", sweep_record,
                        "run-record path (default: <out>.run.json)");

  std::string exp_axis, exp_grid, exp_prefix;
  int exp_replicates = 200;
  ur::SynthConfig exp_base;
  ur::FitConfig exp_fit;
  std::uint64_t exp_seed = 0;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "Monte-Carlo comparison of adjusted vs unadjusted fits");
  exp_cmd->add_option("--axis", exp_axis, "grid axis: tau, size, or mi")
      ->required();
  exp_cmd->add_option("--grid", exp_grid, "grid: start:stop:count or comma list")
      ->required();
  exp_cmd->add_option("--replicates", exp_replicates, "replicates per point");
  exp_cmd->add_option("--n", exp_base.n, "rows per dataset");
  exp_cmd->add_option("--d", exp_base.d, "covariate count");
  exp_cmd->add_option("--tau", exp_base.tau, "underreporting rate");
  exp_cmd->add_option("--theta-a", exp_base.theta_a,
                      "true exposure coefficient");
  exp_cmd->add_option("--phi-scale", exp_base.phi_scale,
                      "scale on propensity weights");
  exp_cmd->add_option("--restarts", exp_fit.restarts, "optimizer restarts");
  exp_cmd->add_option("--max-iter", exp_fit.max_iterations,
                      "optimizer iteration cap");
  exp_cmd->add_option("--grad-tol", exp_fit.grad_tol,
                      "gradient infinity-norm tolerance");
  exp_cmd->add_option("--seed", exp_seed, "master seed");
  exp_cmd->add_option("--out-prefix", exp_prefix,
                      "writes <prefix>.csv and <prefix>.json")
      ->required();

  std::string mi_csv, mi_target = "a_obs", mi_covariates, mi_out;
  CLI::App* mi_cmd = app.add_subcommand(
      "mi", "plug-in mutual information between covariates and a report");
  mi_cmd->add_option("csv", mi_csv, "input CSV path")->required();
  mi_cmd->add_option("--target", mi_target, "a_obs (default) or a_obs2");
  mi_cmd->add_option("--covariates", mi_covariates,
                     "comma list of covariate columns");
  mi_cmd->add_option("--out", mi_out, "run-record path (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (fit_cmd->parsed()) {
      fit_flags.tau_given = fit_cmd->count("--tau") > 0;
      return run_fit(fit_flags, fit_out);
    }
    if (sim_cmd->parsed()) {
      if (tau2_opt->count() > 0) synth.tau2 = synth_tau2;
      if (sat_opt->count() > 0) synth.propensity_saturation = synth_saturation;
      return run_simulate(synth, synth_out, emit_truth);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_flags, sweep_grid, sweep_out, sweep_record);
    }
    if (exp_cmd->parsed()) {
      exp_fit.seed = exp_seed;
      return run_experiment(exp_axis, exp_grid, exp_replicates, exp_base,
                            exp_fit, exp_seed, exp_prefix);
    }
    if (mi_cmd->parsed()) {
      return run_mi(mi_csv, mi_target, mi_covariates, mi_out);
    }
  } catch (const ur::CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
