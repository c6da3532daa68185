#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "../oracles.hpp"
#include "underreport/estimator.hpp"
#include "underreport/synthlab.hpp"

using namespace underreport;

namespace {

SynthDraw quick_draw(Eigen::Index n, Eigen::Index d, double tau,
                     std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.tau = tau;
  cfg.seed = seed;
  return generate(cfg);
}

Dataset tiny_dual(std::initializer_list<int> a1, std::initializer_list<int> a2) {
  Dataset data;
  auto n = static_cast<Eigen::Index>(a1.size());
  data.x = Matrix::Zero(n, 1);
  data.y = BinaryVector::Zero(n);
  data.a_obs.resize(n);
  data.a_obs2 = BinaryVector(n);
  Eigen::Index i = 0;
  for (int v : a1) data.a_obs[i++] = v;
  i = 0;
  for (int v : a2) (*data.a_obs2)[i++] = v;
  for (Eigen::Index r = 0; r < n; ++r) {
    data.x(r, 0) = static_cast<double>(r % 3) - 1.0;
    data.y[r] = static_cast<int>(r % 2);
  }
  return data;
}

bool params_equal(const FullParams& a, const FullParams& b) {
  bool tau_ok = a.error.tau1 == b.error.tau1 &&
                a.error.tau2.has_value() == b.error.tau2.has_value() &&
                (!a.error.tau2 || *a.error.tau2 == *b.error.tau2);
  return tau_ok && a.propensity.intercept == b.propensity.intercept &&
         a.propensity.weights == b.propensity.weights &&
         a.outcome.intercept == b.outcome.intercept &&
         a.outcome.weights == b.outcome.weights &&
         a.outcome.exposure_coef == b.outcome.exposure_coef;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("moment initializer counts disagreements per the crossing rule") {
  Dataset data = tiny_dual({1, 0, 1, 0}, {1, 1, 1, 1});
  MomentInit m = moment_init(data);
  CHECK(m.tau1 == 0.5);  // two of the four second-report positives were missed
  CHECK(m.tau2 == 0.0);  // report two never misses a first-report positive
  CHECK_FALSE(m.fallback1);
  CHECK_FALSE(m.fallback2);
}

TEST_CASE("identical reports give zero estimated masking") {
  Dataset data = tiny_dual({1, 0, 1, 1, 0}, {1, 0, 1, 1, 0});
  MomentInit m = moment_init(data);
  CHECK(m.tau1 == 0.0);
  CHECK(m.tau2 == 0.0);
}

TEST_CASE("degenerate denominator falls back to one tenth with a flag") {
  Dataset data = tiny_dual({1, 1, 0, 1}, {0, 0, 0, 0});
  MomentInit m = moment_init(data);
  CHECK(m.fallback1);       // no rows with the second report positive
  CHECK(m.tau1 == 0.1);
  CHECK_FALSE(m.fallback2);
  CHECK(m.tau2 == doctest::Approx(1.0 - 1e-6));  // every first-report positive missed, clamped
  CHECK(m.tau2 < 1.0);
}

TEST_CASE("moment initializer requires dual reports") {
  Dataset single;
  single.x = Matrix::Zero(3, 1);
  single.y = BinaryVector::Zero(3);
  single.a_obs = BinaryVector::Ones(3);
  CHECK_THROWS_AS(moment_init(single), std::invalid_argument);
}

TEST_CASE("percentile interval nearest-rank endpoints") {
  std::vector<double> v(200);
  for (int i = 0; i < 200; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
  std::shuffle(v.begin(), v.end(), std::mt19937(3));
  auto [lo, hi] = percentile_interval(v, 0.95);
  CHECK(lo == 5.0);
  CHECK(hi == 196.0);

  std::vector<double> w{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto [lo2, hi2] = percentile_interval(w, 0.5);
  CHECK(lo2 == 3.0);
  CHECK(hi2 == 8.0);

  std::vector<double> flat(40, 2.5);
  auto [lo3, hi3] = percentile_interval(flat, 0.95);
  CHECK(lo3 == 2.5);
  CHECK(hi3 == 2.5);
}

TEST_CASE("config validation") {
  FitConfig cfg;
  cfg.mode = FitMode::KnownTau;
  cfg.known_tau = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.known_tau = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.known_tau = 0.25;
  CHECK_NOTHROW(cfg.validate());
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.restarts = 3;
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("warm start pins the masking rate at one tenth") {
  SynthDraw draw = quick_draw(200, 2, 0.25, 40);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  Rng rng_a(derive_seed(1, stream::kRestart, 0));
  Rng rng_b(derive_seed(2, stream::kRestart, 0));
  UnconstrainedParams w0_a = initialize(draw.data, cfg, 0, rng_a);
  UnconstrainedParams w0_b = initialize(draw.data, cfg, 0, rng_b);
  CHECK(w0_a.eta_tau[0] == apply_link(Link::Logit, 0.1));
  // restart zero ignores the stream entirely
  CHECK(w0_a.flatten() == w0_b.flatten());

  Rng rng_c(derive_seed(7, stream::kRestart, 1));
  Rng rng_d(derive_seed(7, stream::kRestart, 1));
  UnconstrainedParams w1_c = initialize(draw.data, cfg, 1, rng_c);
  UnconstrainedParams w1_d = initialize(draw.data, cfg, 1, rng_d);
  CHECK(w1_c.flatten() == w1_d.flatten());            // same stream, same point
  CHECK(w1_c.flatten() != w0_a.flatten());            // jitter moved it
}

TEST_CASE("fixed-rate-zero fit matches a direct Bernoulli regression") {
  for (std::uint64_t seed : {11ull, 12ull}) {
    SynthDraw draw = quick_draw(600, 2, 0.0, seed);
    FitConfig cfg;
    cfg.mode = FitMode::KnownTau;
    cfg.known_tau = 0.0;
    cfg.restarts = 2;
    cfg.seed = 5;
    FitResult r = fit(draw.data, cfg);
    CHECK(r.converged);

    // independent check: y regressed on (x, a_obs) by exact-Hessian Newton
    Matrix design(draw.data.n_rows(), 3);
    design.leftCols(2) = draw.data.x;
    design.col(2) = draw.data.a_obs.cast<double>();
    Vector ref = oracles::irls_logistic(design, draw.data.y);
    CHECK(r.params.outcome.intercept == doctest::Approx(ref[0]).epsilon(1e-4));
    CHECK(r.params.outcome.weights[0] == doctest::Approx(ref[1]).epsilon(1e-4));
    CHECK(r.params.outcome.weights[1] == doctest::Approx(ref[2]).epsilon(1e-4));
    CHECK(r.params.outcome.exposure_coef ==
          doctest::Approx(ref[3]).epsilon(1e-4));
    CHECK(r.params.error.tau1 == 0.0);
  }
}

TEST_CASE("fit is bit-deterministic given data, config, and seed") {
  SynthDraw draw = quick_draw(400, 2, 0.25, 77);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.seed = 123;
  FitResult a = fit(draw.data, cfg);
  FitResult b = fit(draw.data, cfg);
  CHECK(params_equal(a.params, b.params));
  CHECK(a.log_likelihood_at_opt == b.log_likelihood_at_opt);
  CHECK(a.gradient_norm == b.gradient_norm);
  CHECK(a.restart_final_loglik == b.restart_final_loglik);
  CHECK(a.converged == b.converged);
  CHECK(a.n_restarts_agreeing == b.n_restarts_agreeing);
}

TEST_CASE("reported optimum dominates every restart") {
  SynthDraw draw = quick_draw(500, 3, 0.3, 15);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.seed = 9;
  FitResult r = fit(draw.data, cfg);
  REQUIRE(r.restart_final_loglik.size() == 5);
  double best = *std::max_element(r.restart_final_loglik.begin(),
                                  r.restart_final_loglik.end());
  CHECK(r.log_likelihood_at_opt >= best - 1e-9);
  CHECK(r.n_restarts_agreeing >= 1);
  if (r.converged) CHECK(r.gradient_norm <= cfg.grad_tol);
}

TEST_CASE("convergence certificate holds on a routine fit") {
  SynthDraw draw = quick_draw(800, 2, 0.2, 3);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.seed = 4;
  FitResult r = fit(draw.data, cfg);
  CHECK(r.converged);
  CHECK(r.gradient_norm <= cfg.grad_tol);
  // the reported optimum really is a stationary point of the likelihood
  UnconstrainedParams u = UnconstrainedParams::from_constrained(r.params);
  Vector g = gradient(u, draw.data);
  CHECK(g.lpNorm<Eigen::Infinity>() / static_cast<double>(draw.data.n_rows()) <=
        cfg.grad_tol * 1.001);
}

TEST_CASE("single-report modes silently drop a second report column") {
  SynthConfig sc;
  sc.n = 300;
  sc.d = 2;
  sc.tau = 0.25;
  sc.tau2 = 0.4;
  sc.seed = 21;
  SynthDraw draw = generate(sc);
  REQUIRE(draw.data.dual());

  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.seed = 8;
  cfg.restarts = 2;
  FitResult with_extra = fit(draw.data, cfg);
  FitResult plain = fit(draw.data.single_view(), cfg);
  CHECK(params_equal(with_extra.params, plain.params));
  CHECK(with_extra.log_likelihood_at_opt == plain.log_likelihood_at_opt);
}

TEST_CASE("dual mode requires dual data") {
  SynthDraw draw = quick_draw(100, 1, 0.2, 2);
  FitConfig cfg;
  cfg.mode = FitMode::DualObs;
  CHECK_THROWS_AS(fit(draw.data, cfg), std::invalid_argument);
}

TEST_CASE("moment fallback surfaces as a fit warning") {
  Dataset data = tiny_dual({1, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1},
                           {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  FitConfig cfg;
  cfg.mode = FitMode::DualObs;
  cfg.restarts = 1;
  cfg.max_iterations = 60;
  FitResult r = fit(data, cfg);
  bool mentioned = false;
  for (const auto& w : r.warnings) {
    if (w.find("moment") != std::string::npos) mentioned = true;
  }
  CHECK(mentioned);
}

TEST_CASE("masking rate at the boundary is flagged or visibly unconverged") {
  SynthConfig sc;
  sc.n = 4000;
  sc.d = 2;
  sc.tau = 0.3;
  sc.tau2 = 0.0;  // second report never misses
  sc.seed = 31;
  SynthDraw draw = generate(sc);
  FitConfig cfg;
  cfg.mode = FitMode::DualObs;
  cfg.seed = 6;
  cfg.restarts = 2;
  FitResult r = fit(draw.data, cfg);
  REQUIRE(r.params.error.tau2.has_value());
  CHECK(*r.params.error.tau2 < 0.02);
  CHECK((r.boundary_suspect || !r.converged));
}

TEST_CASE("exposure independent of covariates surfaces as instability") {
  // With no covariate signal in the exposure, the masking rate is not
  // identified from a single report; the fits must show it rather than
  // settle on one confident wrong answer: replicate-level tau_hat spread
  // above 0.2, or restart disagreement, or the boundary flag.
  std::vector<double> taus;
  bool any_flag = false;
  for (int rep = 0; rep < 8; ++rep) {
    SynthConfig sc;
    sc.n = 4000;
    sc.d = 3;
    sc.tau = 0.25;
    sc.phi_scale = 0.0;  // A independent of X
    sc.seed = 8000 + static_cast<std::uint64_t>(rep);
    SynthDraw draw = generate(sc);
    FitConfig cfg;
    cfg.mode = FitMode::SingleObs;
    cfg.seed = 90 + static_cast<std::uint64_t>(rep);
    FitResult r = fit(draw.data, cfg);
    taus.push_back(r.params.error.tau1);
    if (r.n_restarts_agreeing < cfg.restarts || r.boundary_suspect) {
      any_flag = true;
    }
  }
  double spread = *std::max_element(taus.begin(), taus.end()) -
                  *std::min_element(taus.begin(), taus.end());
  CHECK((spread > 0.2 || any_flag));
}

TEST_CASE("bootstrap rejects tiny replicate counts and degenerate configs") {
  SynthDraw draw = quick_draw(120, 1, 0.2, 5);
  FitConfig cfg;
  cfg.mode = FitMode::KnownTau;
  cfg.known_tau = 0.2;
  CHECK_THROWS_AS(bootstrap(draw.data, cfg, 5, 0.95, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap(draw.data, cfg, 50, 1.5, 1), std::invalid_argument);
}

TEST_CASE("bootstrap throws when most replicates fail") {
  SynthDraw draw = quick_draw(150, 2, 0.25, 8);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.max_iterations = 1;  // nothing converges in one step
  cfg.grad_tol = 1e-14;
  cfg.restarts = 1;
  CHECK_THROWS_AS(bootstrap(draw.data, cfg, 12, 0.95, 3), std::runtime_error);
}

TEST_CASE("bootstrap is deterministic and insensitive to worker count") {
  SynthDraw draw = quick_draw(250, 1, 0.2, 44);
  FitConfig cfg;
  cfg.mode = FitMode::KnownTau;
  cfg.known_tau = 0.2;
  cfg.restarts = 2;
  cfg.seed = 17;

  setenv("UNDERREPORT_THREADS", "1", 1);
  BootstrapResult serial = bootstrap(draw.data, cfg, 24, 0.9, 55);
  setenv("UNDERREPORT_THREADS", "3", 1);
  BootstrapResult threaded = bootstrap(draw.data, cfg, 24, 0.9, 55);
  unsetenv("UNDERREPORT_THREADS");

  REQUIRE(serial.intervals.size() == threaded.intervals.size());
  for (std::size_t i = 0; i < serial.intervals.size(); ++i) {
    CHECK(serial.intervals[i].name == threaded.intervals[i].name);
    CHECK(serial.intervals[i].point == threaded.intervals[i].point);
    CHECK(serial.intervals[i].lower == threaded.intervals[i].lower);
    CHECK(serial.intervals[i].upper == threaded.intervals[i].upper);
    CHECK(serial.intervals[i].lower <= serial.intervals[i].upper);
  }
  CHECK(serial.n_failed == threaded.n_failed);
}

TEST_CASE("interval names cover parameters and estimands") {
  SynthDraw draw = quick_draw(200, 2, 0.2, 9);
  FitConfig cfg;
  cfg.mode = FitMode::SingleObs;
  cfg.restarts = 2;
  cfg.seed = 2;
  BootstrapResult b = bootstrap(draw.data, cfg, 16, 0.95, 10);
  std::vector<std::string> names;
  for (const auto& iv : b.intervals) names.push_back(iv.name);
  for (const char* expected :
       {"tau", "phi.intercept", "phi.x1", "phi.x2", "theta.intercept",
        "theta.x1", "theta.x2", "theta.exposure", "risk_difference",
        "odds_ratio"}) {
    CAPTURE(expected);
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
}

TEST_CASE("interval width shrinks with sample size") {
  FitConfig cfg;
  cfg.mode = FitMode::KnownTau;
  cfg.known_tau = 0.25;
  cfg.restarts = 1;
  cfg.seed = 5;

  auto rd_width = [&](Eigen::Index n, std::uint64_t seed) {
    SynthDraw draw = quick_draw(n, 2, 0.25, seed);
    BootstrapResult b = bootstrap(draw.data, cfg, 60, 0.95, 33);
    for (const auto& iv : b.intervals) {
      if (iv.name == "risk_difference") return iv.upper - iv.lower;
    }
    throw std::logic_error("missing interval");
  };
  double wide = rd_width(1000, 61);
  double narrow = rd_width(8000, 61);
  CHECK(narrow > 0.0);
  CHECK(wide / narrow >= 1.5);
}

}  // TEST_SUITE
