#include "underreport/effects.hpp"

#include <cmath>
#include <stdexcept>

#include "underreport/exact_sum.hpp"
#include "underreport/parallel.hpp"

namespace underreport {

double risk_difference(const OutcomeParams& outcome, const Dataset& data) {
  data.validate();
  if (outcome.weights.size() != data.n_covariates()) {
    throw std::invalid_argument("risk_difference: covariate size mismatch");
  }
  Vector eta0 = (data.x * outcome.weights).array() + outcome.intercept;
  ExactSum contrasts;
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    contrasts.add(inverse_link(outcome.link, eta0[i] + outcome.exposure_coef) -
                  inverse_link(outcome.link, eta0[i]));
  }
  return contrasts.value() / static_cast<double>(data.n_rows());
}

double adjusted_odds_ratio(const OutcomeParams& outcome) {
  if (outcome.link != Link::Logit) {
    throw std::invalid_argument(
        "adjusted_odds_ratio is only defined for the logit outcome link");
  }
  return std::exp(outcome.exposure_coef);
}

SensitivityBand sensitivity_sweep(const Dataset& data,
                                  const FitConfig& base_config,
                                  const std::vector<double>& tau_grid,
                                  const SweepOptions& options) {
  if (tau_grid.empty()) {
    throw std::invalid_argument("sensitivity_sweep: empty grid");
  }
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] >= 0.0 && tau_grid[i] < 1.0)) {
      throw std::invalid_argument("sensitivity_sweep: grid value " +
                                  std::to_string(tau_grid[i]) +
                                  " outside [0, 1)");
    }
    if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) {
      throw std::invalid_argument(
          "sensitivity_sweep: grid must be strictly increasing");
    }
  }
  data.validate();

  auto points = static_cast<Eigen::Index>(tau_grid.size());
  SensitivityBand band;
  band.tau_grid = tau_grid;
  band.rd_estimates.assign(tau_grid.size(), 0.0);
  band.converged.assign(tau_grid.size(), 0);
  const bool with_ci = options.bootstrap_replicates > 0;
  if (with_ci) {
    band.ci_lower.assign(tau_grid.size(), 0.0);
    band.ci_upper.assign(tau_grid.size(), 0.0);
  }

  parallel_for(points, [&](Eigen::Index g) {
    auto i = static_cast<std::size_t>(g);
    FitConfig config = base_config;
    config.mode = FitMode::KnownTau;
    config.known_tau = tau_grid[i];
    FitResult point = fit(data, config);
    band.rd_estimates[i] = risk_difference(point.params.outcome, data);
    band.converged[i] = point.converged ? 1 : 0;
    if (!with_ci) return;
    try {
      BootstrapResult boot =
          bootstrap(data, config, options.bootstrap_replicates,
                    options.ci_level, config.seed, &point);
      for (const Interval& iv : boot.intervals) {
        if (iv.name == "risk_difference") {
          band.ci_lower[i] = iv.lower;
          band.ci_upper[i] = iv.upper;
        }
      }
    } catch (const std::runtime_error&) {
      // unreliable interval at this grid point; flag the gap, keep the sweep
      band.ci_lower[i] = std::nan("");
      band.ci_upper[i] = std::nan("");
      band.converged[i] = 0;
    }
  });
  return band;
}

}  // namespace underreport
