#include "underreport/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "underreport/effects.hpp"
#include "underreport/glm.hpp"
#include "underreport/lbfgs.hpp"
#include "underreport/parallel.hpp"

namespace underreport {

namespace {

// warm-start regressions only seed the optimizer, so they run at a loose
// tolerance on the sum-scale gradient
constexpr double kWarmGlmTol = 1e-3;
constexpr int kWarmGlmIter = 200;

// moment estimates hit 0 exactly when the reports never disagree; the logit
// warm start needs an interior value
constexpr double kTauStartFloor = 1e-3;

UnconstrainedParams warm_start(const Dataset& data, const FitConfig& config) {
  const Eigen::Index n = data.n_rows();
  const Eigen::Index d = data.n_covariates();

  GlmFit propensity = fit_bernoulli_glm(data.x, data.a_obs,
                                        config.link_propensity, kWarmGlmTol,
                                        kWarmGlmIter);
  Matrix design(n, d + 1);
  design.leftCols(d) = data.x;
  design.col(d) = data.a_obs.cast<double>();
  GlmFit outcome = fit_bernoulli_glm(design, data.y, config.link_outcome,
                                     kWarmGlmTol, kWarmGlmIter);

  UnconstrainedParams u;
  u.link_propensity = config.link_propensity;
  u.link_outcome = config.link_outcome;
  u.phi_flat.resize(d + 1);
  u.phi_flat[0] = propensity.intercept;
  u.phi_flat.segment(1, d) = propensity.weights;
  u.theta_flat.resize(d + 2);
  u.theta_flat[0] = outcome.intercept;
  u.theta_flat.segment(1, d) = outcome.weights.head(d);
  u.theta_flat[d + 1] = outcome.weights[d];

  switch (config.mode) {
    case FitMode::KnownTau:
      u.fixed_tau = config.known_tau;
      u.eta_tau.resize(0);
      break;
    case FitMode::SingleObs:
      u.eta_tau.resize(1);
      u.eta_tau[0] = apply_link(Link::Logit, 0.1);
      break;
    case FitMode::DualObs: {
      MomentInit m = moment_init(data);
      u.eta_tau.resize(2);
      u.eta_tau[0] = apply_link(
          Link::Logit, std::clamp(m.tau1, kTauStartFloor, 1.0 - kTauStartFloor));
      u.eta_tau[1] = apply_link(
          Link::Logit, std::clamp(m.tau2, kTauStartFloor, 1.0 - kTauStartFloor));
      break;
    }
  }
  return u;
}

}  // namespace

void FitConfig::validate() const {
  if (restarts < 1) {
    throw std::invalid_argument("restarts must be at least 1");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (!(grad_tol > 0.0)) {
    throw std::invalid_argument("grad_tol must be positive");
  }
  if (mode == FitMode::KnownTau && !(known_tau >= 0.0 && known_tau < 1.0)) {
    throw std::invalid_argument("known tau must lie in [0, 1)");
  }
}

MomentInit moment_init(const Dataset& data) {
  data.validate();
  if (!data.dual()) {
    throw std::invalid_argument("moment_init needs dual-report data");
  }
  const BinaryVector& a1 = data.a_obs;
  const BinaryVector& a2 = *data.a_obs2;
  long n1 = 0, n2 = 0, miss1 = 0, miss2 = 0;
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    if (a2[i] == 1) {
      ++n2;
      if (a1[i] == 0) ++miss1;
    }
    if (a1[i] == 1) {
      ++n1;
      if (a2[i] == 0) ++miss2;
    }
  }
  MomentInit out;
  constexpr double cap = 1.0 - 1e-6;
  if (n2 == 0) {
    out.tau1 = 0.1;
    out.fallback1 = true;
  } else {
    out.tau1 = std::min(static_cast<double>(miss1) / n2, cap);
  }
  if (n1 == 0) {
    out.tau2 = 0.1;
    out.fallback2 = true;
  } else {
    out.tau2 = std::min(static_cast<double>(miss2) / n1, cap);
  }
  return out;
}

UnconstrainedParams initialize(const Dataset& data, const FitConfig& config,
                               int restart_index, Rng& rng) {
  config.validate();
  UnconstrainedParams u = warm_start(data, config);
  if (restart_index > 0) {
    Vector v = u.flatten();
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] += 0.5 * rng.normal();
    u.assign_flat(v);
  }
  return u;
}

FitResult fit(const Dataset& data, const FitConfig& config) {
  config.validate();
  data.validate();

  Dataset reduced;
  const Dataset* active = &data;
  if (config.mode == FitMode::DualObs) {
    if (!data.dual()) {
      throw std::invalid_argument("dual mode requires the a_obs2 column");
    }
  } else if (data.dual()) {
    reduced = data.single_view();  // second report ignored outside dual mode
    active = &reduced;
  }

  FitResult out;
  if (config.mode == FitMode::DualObs) {
    MomentInit m = moment_init(*active);
    if (m.fallback1) {
      out.warnings.push_back(
          "moment initializer: no rows with a_obs2=1, tau1 start defaulted to 0.1");
    }
    if (m.fallback2) {
      out.warnings.push_back(
          "moment initializer: no rows with a_obs=1, tau2 start defaulted to 0.1");
    }
  }

  UnconstrainedParams layout = warm_start(*active, config);
  UnconstrainedParams eval_params = layout;
  // minimize the per-row average of -log likelihood; the sum-scale objective
  // sits so far above machine epsilon at large N that a line search cannot
  // resolve decreases near the optimum, while the mean scale keeps grad_tol
  // meaningful at every sample size
  const double inv_n = 1.0 / static_cast<double>(active->n_rows());
  Objective objective = [&](const Vector& u, Vector& grad) {
    eval_params.assign_flat(u);
    double ll = log_likelihood_gradient(eval_params, *active, grad);
    grad *= -inv_n;
    return -ll * inv_n;
  };

  LbfgsOptions options;
  options.max_iterations = config.max_iterations;
  options.grad_tol = config.grad_tol;

  LbfgsResult best;
  bool have_best = false;
  auto better = [](const LbfgsResult& cand, const LbfgsResult& cur) {
    bool cand_ok = std::isfinite(cand.f);
    bool cur_ok = std::isfinite(cur.f);
    if (cand_ok != cur_ok) return cand_ok;
    return cand_ok && cand.f < cur.f;
  };
  out.restart_final_loglik.reserve(config.restarts);
  for (int r = 0; r < config.restarts; ++r) {
    UnconstrainedParams start = layout;
    if (r > 0) {
      Rng rng(derive_seed(config.seed, stream::kRestart, r));
      Vector v = start.flatten();
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] += 0.5 * rng.normal();
      start.assign_flat(v);
    }
    LbfgsResult r_out = lbfgs_minimize(objective, start.flatten(), options);
    double final_ll = r_out.status == LbfgsStatus::StartNotFinite
                          ? -HUGE_VAL
                          : -r_out.f / inv_n;
    out.restart_final_loglik.push_back(final_ll);
    if (!have_best || better(r_out, best)) {
      best = std::move(r_out);
      have_best = true;
    }
  }

  eval_params.assign_flat(best.x);
  out.params = eval_params.to_constrained();
  out.log_likelihood_at_opt = -best.f / inv_n;
  out.converged = best.status == LbfgsStatus::GradientConverged;
  out.gradient_norm = best.grad_inf_norm;
  double best_ll = out.log_likelihood_at_opt;
  out.n_restarts_agreeing = static_cast<int>(
      std::count_if(out.restart_final_loglik.begin(),
                    out.restart_final_loglik.end(),
                    [&](double ll) { return ll >= best_ll - 1e-4; }));
  if (config.mode != FitMode::KnownTau) {
    auto near_boundary = [](double t) { return t < 1e-4 || t > 1.0 - 1e-4; };
    out.boundary_suspect = near_boundary(out.params.error.tau1) ||
                           (out.params.error.tau2 &&
                            near_boundary(*out.params.error.tau2));
  }
  if (!out.converged) {
    out.warnings.push_back("no restart reached the gradient tolerance");
  }
  return out;
}

std::pair<double, double> percentile_interval(std::vector<double> values,
                                              double ci_level) {
  if (values.empty()) {
    throw std::invalid_argument("percentile_interval: no values");
  }
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw std::invalid_argument("ci_level must lie in (0, 1)");
  }
  std::sort(values.begin(), values.end());
  auto b = static_cast<long>(values.size());
  // nearest-rank; the epsilon keeps exact multiples like 0.025 * 200 = 5
  // from being pushed up a rank by floating-point residue
  long k = static_cast<long>(std::ceil(0.5 * (1.0 - ci_level) * b - 1e-9));
  k = std::clamp(k, 1L, b);
  long hi = std::max(b - k, k - 1L);
  return {values[k - 1], values[hi]};
}

BootstrapResult bootstrap(const Dataset& data, const FitConfig& config,
                          int replicates, double ci_level, std::uint64_t seed,
                          const FitResult* point) {
  if (replicates < 10) {
    throw std::invalid_argument("bootstrap needs at least 10 replicates");
  }
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw std::invalid_argument("ci_level must lie in (0, 1)");
  }
  config.validate();
  data.validate();

  BootstrapResult out;
  out.point = point ? *point : fit(data, config);
  out.replicates = replicates;
  out.ci_level = ci_level;

  const Eigen::Index d = data.n_covariates();
  const bool track_tau = config.mode != FitMode::KnownTau;
  const bool track_tau2 = config.mode == FitMode::DualObs;
  const bool track_or = config.link_outcome == Link::Logit;

  std::vector<std::string> names;
  std::vector<double> point_values;
  auto add = [&](const std::string& name, double value) {
    names.push_back(name);
    point_values.push_back(value);
  };
  auto collect = [&](const FullParams& p, const Dataset& rows,
                     std::vector<double>& into) {
    if (track_tau) into.push_back(p.error.tau1);
    if (track_tau2) into.push_back(*p.error.tau2);
    into.push_back(p.propensity.intercept);
    for (Eigen::Index j = 0; j < d; ++j) into.push_back(p.propensity.weights[j]);
    into.push_back(p.outcome.intercept);
    for (Eigen::Index j = 0; j < d; ++j) into.push_back(p.outcome.weights[j]);
    into.push_back(p.outcome.exposure_coef);
    into.push_back(risk_difference(p.outcome, rows));
    if (track_or) into.push_back(std::exp(p.outcome.exposure_coef));
  };
  {
    if (track_tau) add("tau", out.point.params.error.tau1);
    if (track_tau2) add("tau2", *out.point.params.error.tau2);
    add("phi.intercept", out.point.params.propensity.intercept);
    for (Eigen::Index j = 0; j < d; ++j) {
      add("phi.x" + std::to_string(j + 1), out.point.params.propensity.weights[j]);
    }
    add("theta.intercept", out.point.params.outcome.intercept);
    for (Eigen::Index j = 0; j < d; ++j) {
      add("theta.x" + std::to_string(j + 1), out.point.params.outcome.weights[j]);
    }
    add("theta.exposure", out.point.params.outcome.exposure_coef);
    add("risk_difference", risk_difference(out.point.params.outcome, data));
    if (track_or) {
      add("odds_ratio", std::exp(out.point.params.outcome.exposure_coef));
    }
  }

  FitConfig rep_config = config;
  rep_config.restarts = std::min(config.restarts, 2);
  const Eigen::Index n = data.n_rows();
  std::vector<char> ok(static_cast<std::size_t>(replicates), 0);
  std::vector<std::vector<double>> values(static_cast<std::size_t>(replicates));

  parallel_for(replicates, [&](Eigen::Index i) {
    Rng resampler(derive_seed(seed, stream::kBootResample,
                              static_cast<std::uint64_t>(i)));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) {
      r = static_cast<Eigen::Index>(resampler.below(static_cast<std::uint64_t>(n)));
    }
    Dataset sample = data.resample(rows);
    FitConfig c = rep_config;
    c.seed = derive_seed(seed, stream::kBootFit, static_cast<std::uint64_t>(i));
    FitResult r = fit(sample, c);
    if (!r.converged) return;
    auto idx = static_cast<std::size_t>(i);
    collect(r.params, sample, values[idx]);
    ok[idx] = 1;
  });

  for (char flag : ok) {
    if (!flag) ++out.n_failed;
  }
  if (2 * out.n_failed > replicates) {
    throw std::runtime_error(
        "bootstrap unreliable: " + std::to_string(out.n_failed) + " of " +
        std::to_string(replicates) + " replicates failed to converge");
  }

  for (std::size_t q = 0; q < names.size(); ++q) {
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(replicates));
    for (std::size_t i = 0; i < ok.size(); ++i) {
      if (ok[i]) draws.push_back(values[i][q]);
    }
    auto [lo, hi] = percentile_interval(std::move(draws), ci_level);
    out.intervals.push_back(Interval{names[q], point_values[q], lo, hi});
  }
  return out;
}

}  // namespace underreport
