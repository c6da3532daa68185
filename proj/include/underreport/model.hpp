#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "underreport/links.hpp"

namespace underreport {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BinaryVector = Eigen::VectorXi;  // entries restricted to {0, 1}

// Rows pair an outcome y with the reported exposure a_obs; the true exposure
// is never stored because the model never sees it.  a_obs2 is present only
// for data carrying two independently reported exposures.
struct Dataset {
  Matrix x;
  BinaryVector y;
  BinaryVector a_obs;
  std::optional<BinaryVector> a_obs2;

  Eigen::Index n_rows() const { return y.size(); }
  Eigen::Index n_covariates() const { return x.cols(); }
  bool dual() const { return a_obs2.has_value(); }

  // throws std::invalid_argument on size mismatch, non-binary entries,
  // non-finite covariates, or empty data
  void validate() const;

  // copy without the second reported exposure
  Dataset single_view() const;

  // row selection (with repeats allowed), used by the bootstrap;
  // throws std::out_of_range on an index outside [0, n_rows)
  Dataset resample(const std::vector<Eigen::Index>& rows) const;
};

// reporting model: a true exposure is missed with probability tau, a true
// non-exposure is never invented
struct ErrorRate {
  double tau1 = 0.0;
  std::optional<double> tau2;

  bool dual() const { return tau2.has_value(); }
};

struct PropensityParams {
  double intercept = 0.0;
  Vector weights;
  Link link = Link::Logit;
};

struct OutcomeParams {
  double intercept = 0.0;
  Vector weights;
  double exposure_coef = 0.0;
  Link link = Link::Logit;
};

struct FullParams {
  ErrorRate error;
  PropensityParams propensity;
  OutcomeParams outcome;

  // throws std::invalid_argument if weight sizes disagree with n_covariates
  // or any tau lies outside [0, 1)
  void validate(Eigen::Index n_covariates) const;
};

// P(a_obs | a_true) under the one-sided reporting model
double error_prob(double tau, int a_obs, int a_true);

// P(A = 1 | x)
double propensity_prob(const PropensityParams& params,
                       const Eigen::Ref<const Vector>& x);

// P(Y = y | a, x)
double outcome_prob(const OutcomeParams& params, int a,
                    const Eigen::Ref<const Vector>& x, int y);

// P(a_obs, y | x), marginalized over the latent exposure; single-report
// parameters required
double joint_conditional(const FullParams& params,
                         const Eigen::Ref<const Vector>& x, int a_obs, int y);

// P(a_obs, a_obs2, y | x) for dual-report parameters
double joint_conditional(const FullParams& params,
                         const Eigen::Ref<const Vector>& x, int a_obs,
                         int a_obs2, int y);

}  // namespace underreport
