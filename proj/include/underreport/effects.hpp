#pragma once

#include <vector>

#include "underreport/estimator.hpp"

namespace underreport {

struct SensitivityBand {
  std::vector<double> tau_grid;
  std::vector<double> rd_estimates;
  std::vector<double> ci_lower;  // empty without bootstrap
  std::vector<double> ci_upper;
  std::vector<char> converged;  // per grid point; 0 flags a gap in the band
};

struct SweepOptions {
  int bootstrap_replicates = 0;  // 0 disables per-point intervals
  double ci_level = 0.95;
};

// covariate-averaged difference in outcome probability between exposed and
// unexposed, evaluated over the rows of data
double risk_difference(const OutcomeParams& outcome, const Dataset& data);

// exp(exposure coefficient); defined for the logit outcome link only
double adjusted_odds_ratio(const OutcomeParams& outcome);

// Refits with the error rate pinned at each grid value and records the risk
// difference, the sensitivity-band view of the model.  Grid points reuse
// base_config.seed, so a singleton grid reproduces a direct fixed-rate fit
// bit for bit.  Fit failures are flagged in converged, never dropped.
SensitivityBand sensitivity_sweep(const Dataset& data,
                                  const FitConfig& base_config,
                                  const std::vector<double>& tau_grid,
                                  const SweepOptions& options = {});

}  // namespace underreport
