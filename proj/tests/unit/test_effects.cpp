#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "../oracles.hpp"
#include "underreport/effects.hpp"
#include "underreport/synthlab.hpp"

using namespace underreport;

namespace {

Dataset covariate_rows(std::initializer_list<double> xs) {
  Dataset data;
  auto n = static_cast<Eigen::Index>(xs.size());
  data.x.resize(n, 1);
  Eigen::Index i = 0;
  for (double v : xs) data.x(i++, 0) = v;
  data.y = BinaryVector::Zero(n);
  data.a_obs = BinaryVector::Zero(n);
  return data;
}

}  // namespace

TEST_SUITE("effects") {

TEST_CASE("intercept-only contrast is the closed-form difference") {
  OutcomeParams out;
  out.intercept = 0.0;
  out.weights = Vector::Zero(1);
  out.exposure_coef = 1.0;
  Dataset data = covariate_rows({-2.0, -0.5, 0.0, 1.0, 3.0, 4.2, -7.0});
  double expected = 0.7310585786300049 - 0.5;
  CHECK(risk_difference(out, data) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.2310585786300049).epsilon(1e-12));
}

TEST_CASE("contrast averages the per-row differences") {
  oracles::InstanceGen gen(88);
  OutcomeParams out;
  out.intercept = gen.normal();
  out.weights = Vector::Constant(1, gen.normal());
  out.exposure_coef = gen.normal();
  Dataset data = covariate_rows({0.5, -1.5, 2.5, 0.0});
  long double ref = 0.0L;
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    FullParams p;
    p.outcome = out;
    p.propensity.weights = Vector::Zero(1);
    ref += oracles::row_outcome(p, 1, data.x.row(i), 1) -
           oracles::row_outcome(p, 0, data.x.row(i), 1);
  }
  double expected = static_cast<double>(ref / 4.0L);
  CHECK(risk_difference(out, data) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("contrast is exactly permutation invariant and duplication stable") {
  SynthConfig sc;
  sc.n = 150;
  sc.d = 3;
  sc.seed = 19;
  SynthDraw draw = generate(sc);
  const OutcomeParams& out = draw.true_params.outcome;
  double base = risk_difference(out, draw.data);

  std::vector<Eigen::Index> order(150);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(4));
  CHECK(risk_difference(out, draw.data.resample(order)) == base);

  std::vector<Eigen::Index> twice(order);
  twice.insert(twice.end(), order.begin(), order.end());
  CHECK(std::abs(risk_difference(out, draw.data.resample(twice)) - base) <=
        1e-12);
}

TEST_CASE("odds ratio is the exponentiated exposure coefficient, logit only") {
  OutcomeParams out;
  out.intercept = -0.3;
  out.weights = Vector::Zero(2);
  out.exposure_coef = 1.0;
  CHECK(adjusted_odds_ratio(out) ==
        doctest::Approx(2.718281828459045).epsilon(1e-12));
  out.link = Link::Probit;
  CHECK_THROWS_AS(adjusted_odds_ratio(out), std::invalid_argument);
  out.link = Link::Cloglog;
  CHECK_THROWS_AS(adjusted_odds_ratio(out), std::invalid_argument);
}

TEST_CASE("singleton sweep reproduces a direct fixed-rate fit bit for bit") {
  SynthConfig sc;
  sc.n = 400;
  sc.d = 2;
  sc.tau = 0.3;
  sc.seed = 23;
  SynthDraw draw = generate(sc);

  FitConfig base;
  base.mode = FitMode::SingleObs;  // sweep overrides the mode per grid point
  base.seed = 31;
  base.restarts = 2;
  SensitivityBand band = sensitivity_sweep(draw.data, base, {0.3});
  REQUIRE(band.rd_estimates.size() == 1);
  REQUIRE(band.converged.size() == 1);

  FitConfig direct = base;
  direct.mode = FitMode::KnownTau;
  direct.known_tau = 0.3;
  FitResult r = fit(draw.data, direct);
  CHECK(band.rd_estimates[0] == risk_difference(r.params.outcome, draw.data));
  CHECK(static_cast<bool>(band.converged[0]) == r.converged);
  CHECK(band.ci_lower.empty());
  CHECK(band.ci_upper.empty());
}

TEST_CASE("band stays aligned across a grid and flags failures") {
  SynthConfig sc;
  sc.n = 300;
  sc.d = 1;
  sc.tau = 0.25;
  sc.seed = 3;
  SynthDraw draw = generate(sc);
  FitConfig base;
  base.seed = 11;
  base.restarts = 1;

  SensitivityBand band = sensitivity_sweep(draw.data, base, {0.0, 0.2, 0.5});
  CHECK(band.tau_grid == std::vector<double>{0.0, 0.2, 0.5});
  CHECK(band.rd_estimates.size() == 3);
  CHECK(band.converged.size() == 3);
  for (char c : band.converged) CHECK(c == 1);

  FitConfig strangled = base;
  strangled.max_iterations = 1;
  strangled.grad_tol = 1e-15;
  SensitivityBand broken = sensitivity_sweep(draw.data, strangled, {0.1, 0.4});
  CHECK(broken.rd_estimates.size() == 2);
  for (char c : broken.converged) CHECK(c == 0);
}

TEST_CASE("grid validation") {
  SynthConfig sc;
  sc.n = 100;
  sc.d = 1;
  sc.seed = 1;
  SynthDraw draw = generate(sc);
  FitConfig base;
  CHECK_THROWS_AS(sensitivity_sweep(draw.data, base, {}), std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_sweep(draw.data, base, {0.4, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_sweep(draw.data, base, {0.2, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_sweep(draw.data, base, {0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_sweep(draw.data, base, {-0.1, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("per-point intervals are well ordered when requested") {
  SynthConfig sc;
  sc.n = 250;
  sc.d = 1;
  sc.tau = 0.2;
  sc.seed = 47;
  SynthDraw draw = generate(sc);
  FitConfig base;
  base.seed = 13;
  base.restarts = 1;
  SweepOptions opts;
  opts.bootstrap_replicates = 20;
  SensitivityBand band = sensitivity_sweep(draw.data, base, {0.1, 0.3}, opts);
  REQUIRE(band.ci_lower.size() == 2);
  REQUIRE(band.ci_upper.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(band.ci_lower[i] <= band.rd_estimates[i] + 1.0);  // finite
    CHECK(band.ci_lower[i] <= band.ci_upper[i]);
  }
}

}  // TEST_SUITE
