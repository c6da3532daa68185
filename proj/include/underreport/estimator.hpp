#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "underreport/likelihood.hpp"
#include "underreport/rng.hpp"

namespace underreport {

enum class FitMode { KnownTau, SingleObs, DualObs };

struct FitConfig {
  FitMode mode = FitMode::SingleObs;
  double known_tau = 0.0;  // read only in KnownTau mode
  Link link_propensity = Link::Logit;
  Link link_outcome = Link::Logit;
  int restarts = 5;
  int max_iterations = 500;
  // infinity-norm tolerance on the gradient of the per-row mean log
  // likelihood, so convergence means the same thing at every sample size
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct FitResult {
  FullParams params;
  double log_likelihood_at_opt = 0.0;
  bool converged = false;
  double gradient_norm = 0.0;  // mean-scale infinity norm at the optimum
  int n_restarts_agreeing = 0;  // restarts within 1e-4 log likelihood of best
  bool boundary_suspect = false;  // some tau-hat below 1e-4 or above 1 - 1e-4
  std::vector<double> restart_final_loglik;
  std::vector<std::string> warnings;
};

struct MomentInit {
  double tau1 = 0.0;
  double tau2 = 0.0;
  bool fallback1 = false;  // denominator was zero, value defaulted to 0.1
  bool fallback2 = false;
};

// Cross-tabulation estimate of both error rates from dual reports: tau1 is
// the fraction of rows with a_obs = 0 among rows with a_obs2 = 1, and
// symmetrically for tau2.  Estimates are clamped into [0, 1 - 1e-6].
MomentInit moment_init(const Dataset& data);

// Starting point for one restart.  Restart 0 is the deterministic warm
// start: propensity coefficients from a Bernoulli regression of a_obs on x,
// outcome coefficients from one of y on (x, a_obs), and the error rate at
// 0.1 (dual mode: at the moment estimates).  Later restarts perturb the warm
// start with 0.5 * N(0, I) noise from rng.
UnconstrainedParams initialize(const Dataset& data, const FitConfig& config,
                               int restart_index, Rng& rng);

// maximum-likelihood fit; deterministic given (data, config)
FitResult fit(const Dataset& data, const FitConfig& config);

struct Interval {
  std::string name;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  FitResult point;
  int replicates = 0;
  int n_failed = 0;
  double ci_level = 0.95;
  std::vector<Interval> intervals;
};

// Case-resampling percentile bootstrap over parameters and estimands.
// Replicates that fail to converge are dropped and counted; more than 50%
// failures throws std::runtime_error.  A precomputed point fit for this
// exact (data, config) can be passed to skip refitting it.
BootstrapResult bootstrap(const Dataset& data, const FitConfig& config,
                          int replicates, double ci_level, std::uint64_t seed,
                          const FitResult* point = nullptr);

// nearest-rank percentile interval at levels (1-ci)/2 and 1-(1-ci)/2
std::pair<double, double> percentile_interval(std::vector<double> values,
                                              double ci_level);

}  // namespace underreport
