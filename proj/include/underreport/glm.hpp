#pragma once

#include "underreport/model.hpp"

namespace underreport {

struct GlmFit {
  double intercept = 0.0;
  Vector weights;
  bool converged = false;
  double log_likelihood = 0.0;
};

// Bernoulli regression of target on design, intercept added internally;
// grad_tol applies to the per-row mean gradient.  Separable data stops at
// max_iterations with converged = false; the coefficients returned are
// still the best point found, which is all the warm-start and
// mutual-information callers need.
GlmFit fit_bernoulli_glm(const Matrix& design, const BinaryVector& target,
                         Link link = Link::Logit, double grad_tol = 1e-8,
                         int max_iterations = 300);

}  // namespace underreport
