#include "underreport/glm.hpp"

#include <cmath>
#include <stdexcept>

#include "underreport/lbfgs.hpp"

namespace underreport {

GlmFit fit_bernoulli_glm(const Matrix& design, const BinaryVector& target,
                         Link link, double grad_tol, int max_iterations) {
  const Eigen::Index n = design.rows();
  const Eigen::Index d = design.cols();
  if (target.size() != n || n == 0) {
    throw std::invalid_argument("fit_bernoulli_glm: design/target size mismatch");
  }

  Vector yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (target[i] != 0 && target[i] != 1) {
      throw std::invalid_argument("fit_bernoulli_glm: target must be binary");
    }
    yv[i] = target[i];
  }

  // beta = [intercept, weights]; per-row mean of -log likelihood so grad_tol
  // means the same thing at every sample size
  const double inv_n = 1.0 / static_cast<double>(n);
  Objective objective = [&](const Vector& beta, Vector& grad) {
    Vector eta = (design * beta.tail(d)).array() + beta[0];
    double nll = 0.0;
    Vector c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = inverse_link(link, eta[i]);
      nll -= yv[i] == 1.0 ? std::log(p) : std::log1p(-p);
      double deriv = inverse_link_derivative(link, eta[i]);
      c[i] = -(yv[i] - p) * deriv / (p * (1.0 - p));
    }
    grad.resize(d + 1);
    grad[0] = c.sum() * inv_n;
    grad.tail(d) = design.transpose() * c * inv_n;
    return nll * inv_n;
  };

  Vector start = Vector::Zero(d + 1);
  double ybar = yv.mean();
  start[0] = apply_link(link, std::clamp(ybar, 0.01, 0.99));

  LbfgsOptions options;
  options.grad_tol = grad_tol;
  options.max_iterations = max_iterations;
  LbfgsResult r = lbfgs_minimize(objective, start, options);

  GlmFit fit;
  fit.intercept = r.x[0];
  fit.weights = r.x.tail(d);
  fit.converged = r.converged();
  fit.log_likelihood = -r.f * static_cast<double>(n);
  return fit;
}

}  // namespace underreport
