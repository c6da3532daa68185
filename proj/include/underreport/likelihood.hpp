#pragma once

#include <functional>
#include <optional>

#include "underreport/model.hpp"

namespace underreport {

// Optimizer-facing parameterization.  Error rates live on the logit scale so
// every free coordinate is unconstrained; with fixed_tau set the error rate
// is a constant and contributes no coordinates.
//
// Flat layout: [eta_tau...] [phi intercept, phi weights...]
//              [theta intercept, theta weights..., exposure coefficient]
struct UnconstrainedParams {
  Link link_propensity = Link::Logit;
  Link link_outcome = Link::Logit;
  std::optional<double> fixed_tau;
  Vector eta_tau;     // size 0 (fixed), 1 (single report), or 2 (dual report)
  Vector phi_flat;    // size d + 1
  Vector theta_flat;  // size d + 2

  Eigen::Index n_covariates() const { return phi_flat.size() - 1; }
  Eigen::Index free_count() const {
    return eta_tau.size() + phi_flat.size() + theta_flat.size();
  }

  Vector flatten() const;
  // writes a flat vector of free_count() entries back into the blocks
  void assign_flat(const Eigen::Ref<const Vector>& u);

  FullParams to_constrained() const;

  // fix_tau freezes the error rate instead of mapping it to the logit scale;
  // free error rates must lie strictly inside (0, 1)
  static UnconstrainedParams from_constrained(const FullParams& params,
                                              bool fix_tau = false);
};

// marginal log likelihood of the data under params; rows with a joint
// probability below 1e-12 contribute log(1e-12)
double log_likelihood(const UnconstrainedParams& params, const Dataset& data);

// analytic gradient in the flat layout
Vector gradient(const UnconstrainedParams& params, const Dataset& data);

// one-pass value plus gradient, the optimizer entry point
double log_likelihood_gradient(const UnconstrainedParams& params,
                               const Dataset& data, Vector& grad);

// componentwise central differences of an arbitrary scalar function; a
// zero-length input yields a zero-length result
Vector central_difference(const std::function<double(const Vector&)>& f,
                          const Vector& u0, double step);

// central finite differences through log_likelihood only; test oracle for
// the analytic gradient, never called by it
Vector fd_gradient_oracle(const UnconstrainedParams& params,
                          const Dataset& data, double step = 1e-6);

}  // namespace underreport
