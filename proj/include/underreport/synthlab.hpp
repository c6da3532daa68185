#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "underreport/estimator.hpp"

namespace underreport {

struct SynthConfig {
  Eigen::Index n = 1000;
  Eigen::Index d = 5;
  double tau = 0.25;
  std::optional<double> tau2;  // adds a second, independently masked report
  double theta_a = 1.0;
  double phi_scale = 1.0;  // multiplies propensity weights, intercept untouched
  // scaled-logistic propensity ceiling alpha*expit(eta); breaks the link-form
  // assumption on purpose, for non-identifiability studies
  std::optional<double> propensity_saturation;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct SynthDraw {
  Dataset data;
  FullParams true_params;
  double true_rd = 0.0;
  BinaryVector a_true;  // generator-side truth, never part of Dataset
};

// Covariates are standard normal; coefficient vectors are drawn standard
// normal per dataset (exposure coefficient fixed at theta_a); exposure is
// Bernoulli of the propensity; each report masks a true exposure with its
// rate; the outcome is Bernoulli of the logit outcome model.  true_rd is the
// covariate-averaged contrast under the true outcome parameters.
SynthDraw generate(const SynthConfig& config);

enum class MiTarget { ObsExposure, ObsExposure2 };

// Plug-in mutual information (nats) between covariates and a reported
// exposure: fit a logit regression of the report on x, then H(mean fitted
// probability) minus mean per-row entropy, clamped at 0.  A degenerate
// report (all 0 or all 1) returns 0 and sets *degenerate when supplied.
// Needs at least 50 rows.
double mutual_information(const Dataset& data,
                          MiTarget target = MiTarget::ObsExposure,
                          bool* degenerate = nullptr);

enum class ExperimentAxis { TauSweep, SizeSweep, MiSweep };

struct ExperimentReport {
  ExperimentAxis axis = ExperimentAxis::TauSweep;
  std::vector<double> grid;
  std::vector<double> mse_adjusted;
  std::vector<double> mse_unadjusted;
  int replicates = 0;
  // per grid point
  std::vector<int> n_failed;     // replicate pairs dropped
  std::vector<char> flagged;     // 1 when more than 20% of pairs dropped
  std::vector<double> mi_measured;  // mean plug-in MI; MiSweep only, else empty
  // per grid point x replicate, row-major; kept for audit
  std::vector<double> true_rd_per_replicate;
};

// Monte-Carlo comparison of the error-adjusted estimator against the
// unadjusted fixed-rate-zero fit on identical simulated datasets (paired
// design).  The axis controls which SynthConfig field the grid varies:
// TauSweep the masking rate, SizeSweep the sample count, MiSweep the
// propensity weight scale.
ExperimentReport run_experiment(ExperimentAxis axis,
                                const std::vector<double>& grid,
                                const SynthConfig& base, int replicates,
                                const FitConfig& fit_config,
                                std::uint64_t seed);

}  // namespace underreport
