#include "underreport/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace underreport {

namespace {

struct Point {
  double a = 0.0;     // step length
  double f = 0.0;     // objective at the step
  double dphi = 0.0;  // directional derivative at the step
};

// cubic minimizer between two bracketing points, bisection when the cubic is
// degenerate, non-finite, or lands outside the safeguarded interior
double interpolate(const Point& lo, const Point& hi) {
  double lower = std::min(lo.a, hi.a);
  double upper = std::max(lo.a, hi.a);
  double mid = 0.5 * (lower + upper);
  if (!std::isfinite(lo.f) || !std::isfinite(hi.f) ||
      !std::isfinite(lo.dphi) || !std::isfinite(hi.dphi)) {
    return mid;
  }
  double d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (lo.a - hi.a);
  double disc = d1 * d1 - lo.dphi * hi.dphi;
  if (!(disc >= 0.0)) return mid;
  double d2 = std::sqrt(disc);
  if (hi.a < lo.a) d2 = -d2;
  double denom = hi.dphi - lo.dphi + 2.0 * d2;
  if (denom == 0.0) return mid;
  double a = hi.a - (hi.a - lo.a) * (hi.dphi + d2 - d1) / denom;
  double margin = 0.1 * (upper - lower);
  if (!std::isfinite(a) || a < lower + margin || a > upper - margin) return mid;
  return a;
}

struct LineSearchOutcome {
  bool ok = false;
  double a = 0.0;
  double f = 0.0;
  Vector x;
  Vector g;
};

// strong Wolfe search: bracket by expansion, then shrink with zoom
LineSearchOutcome line_search(const Objective& objective, const Vector& x0,
                              double f0, double dphi0, const Vector& direction,
                              double a_init, const LbfgsOptions& options,
                              int& evals) {
  LineSearchOutcome out;
  Vector x_trial(x0.size()), g_trial(x0.size());
  auto eval = [&](double a) {
    x_trial = x0 + a * direction;
    double f = objective(x_trial, g_trial);
    ++evals;
    Point p;
    p.a = a;
    p.f = std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    p.dphi = g_trial.allFinite() ? g_trial.dot(direction)
                                 : std::numeric_limits<double>::infinity();
    return p;
  };
  // only valid immediately after eval() of the same point
  auto accept = [&](const Point& p) {
    out.ok = true;
    out.a = p.a;
    out.f = p.f;
    out.x = x_trial;
    out.g = g_trial;
  };

  const double c1 = options.wolfe_c1;
  const double c2 = options.wolfe_c2;
  auto armijo_ok = [&](const Point& p) { return p.f <= f0 + c1 * p.a * dphi0; };
  auto curvature_ok = [&](const Point& p) {
    return std::fabs(p.dphi) <= -c2 * dphi0;
  };

  auto zoom = [&](Point lo, Point hi) {
    for (int j = 0; j < options.max_line_search; ++j) {
      if (std::fabs(hi.a - lo.a) <=
          1e-14 * std::max(1.0, std::max(std::fabs(lo.a), std::fabs(hi.a)))) {
        break;
      }
      Point trial = eval(interpolate(lo, hi));
      if (!armijo_ok(trial) || trial.f >= lo.f) {
        hi = trial;
        continue;
      }
      if (curvature_ok(trial)) {
        accept(trial);
        return;
      }
      if (trial.dphi * (hi.a - lo.a) >= 0.0) hi = lo;
      lo = trial;
    }
    // bracket collapsed without meeting the curvature condition; a plain
    // decrease still makes progress, so take the low point if it has one
    if (std::isfinite(lo.f) && lo.f < f0 && lo.a > 0.0) {
      Point back = eval(lo.a);
      if (std::isfinite(back.f) && back.f < f0) accept(back);
    }
  };

  Point prev{0.0, f0, dphi0};
  double a = a_init;
  for (int i = 0; i < options.max_line_search; ++i) {
    Point trial = eval(a);
    if (!std::isfinite(trial.f)) {
      a = 0.5 * (prev.a + a);  // overshot into a non-finite region
      continue;
    }
    if (!armijo_ok(trial) || (i > 0 && trial.f >= prev.f)) {
      zoom(prev, trial);
      return out;
    }
    if (curvature_ok(trial)) {
      accept(trial);
      return out;
    }
    if (trial.dphi >= 0.0) {
      zoom(trial, prev);
      return out;
    }
    prev = trial;
    a = std::min(2.0 * a, 1e10);
  }
  return out;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, const Vector& start,
                           const LbfgsOptions& options) {
  LbfgsResult result;
  const Eigen::Index n = start.size();
  Vector x = start;
  Vector g(n);
  double f = objective(x, g);
  result.n_evals = 1;
  if (!std::isfinite(f) || !g.allFinite()) {
    result.x = x;
    result.f = f;
    result.grad = g;
    result.grad_inf_norm = std::numeric_limits<double>::infinity();
    result.status = LbfgsStatus::StartNotFinite;
    return result;
  }

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  double gamma = 1.0;
  Vector q(n), direction(n);
  std::vector<double> alpha;

  result.status = LbfgsStatus::MaxIterations;
  for (int iter = 0;; ++iter) {
    double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= options.grad_tol) {
      result.status = LbfgsStatus::GradientConverged;
      break;
    }
    if (iter >= options.max_iterations) break;

    // two-loop recursion for the quasi-Newton direction
    q = g;
    std::size_t m = s_hist.size();
    alpha.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    q *= gamma;
    for (std::size_t i = 0; i < m; ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    direction = -q;

    double dphi0 = g.dot(direction);
    if (!(dphi0 < 0.0) || !direction.allFinite()) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      gamma = 1.0;
      direction = -g;
      dphi0 = -g.squaredNorm();
    }

    double a_init = iter == 0 ? std::min(1.0, 1.0 / gnorm) : 1.0;
    int evals = 0;
    LineSearchOutcome step =
        line_search(objective, x, f, dphi0, direction, a_init, options, evals);
    result.n_evals += evals;
    if (!step.ok) {
      result.status = LbfgsStatus::LineSearchFailed;
      break;
    }

    Vector s = step.x - x;
    Vector yv = step.g - g;
    x = step.x;
    f = step.f;
    g = step.g;
    result.iterations = iter + 1;

    double sy = s.dot(yv);
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      gamma = sy / y_hist.back().squaredNorm();
    }
  }

  result.x = x;
  result.f = f;
  result.grad = g;
  result.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  return result;
}

}  // namespace underreport
