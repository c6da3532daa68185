#include "underreport/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace underreport {

namespace {

void check_binary(const BinaryVector& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0 && v[i] != 1) {
      throw std::invalid_argument(std::string(name) + " has non-binary entry " +
                                  std::to_string(v[i]) + " at row " +
                                  std::to_string(i));
    }
  }
}

void check_tau(double tau, const char* name) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1), got " +
                                std::to_string(tau));
  }
}

void check_binary_arg(int v, const char* name) {
  if (v != 0 && v != 1) {
    throw std::invalid_argument(std::string(name) + " must be 0 or 1");
  }
}

}  // namespace

void Dataset::validate() const {
  if (y.size() == 0) {
    throw std::invalid_argument("dataset is empty");
  }
  if (a_obs.size() != y.size()) {
    throw std::invalid_argument("a_obs length " + std::to_string(a_obs.size()) +
                                " != y length " + std::to_string(y.size()));
  }
  if (x.rows() != y.size()) {
    throw std::invalid_argument("x has " + std::to_string(x.rows()) +
                                " rows but y has " + std::to_string(y.size()));
  }
  if (a_obs2 && a_obs2->size() != y.size()) {
    throw std::invalid_argument("a_obs2 length " +
                                std::to_string(a_obs2->size()) + " != y length " +
                                std::to_string(y.size()));
  }
  check_binary(y, "y");
  check_binary(a_obs, "a_obs");
  if (a_obs2) check_binary(*a_obs2, "a_obs2");
  if (!x.allFinite()) {
    throw std::invalid_argument("x contains non-finite entries");
  }
}

Dataset Dataset::single_view() const {
  Dataset out;
  out.x = x;
  out.y = y;
  out.a_obs = a_obs;
  return out;
}

Dataset Dataset::resample(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  auto n = static_cast<Eigen::Index>(rows.size());
  out.x.resize(n, x.cols());
  out.y.resize(n);
  out.a_obs.resize(n);
  if (a_obs2) out.a_obs2.emplace(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index r = rows[static_cast<std::size_t>(i)];
    if (r < 0 || r >= n_rows()) {
      throw std::out_of_range("resample: row index out of range");
    }
    out.x.row(i) = x.row(r);
    out.y[i] = y[r];
    out.a_obs[i] = a_obs[r];
    if (a_obs2) (*out.a_obs2)[i] = (*a_obs2)[r];
  }
  return out;
}

void FullParams::validate(Eigen::Index n_covariates) const {
  check_tau(error.tau1, "tau1");
  if (error.tau2) check_tau(*error.tau2, "tau2");
  if (propensity.weights.size() != n_covariates) {
    throw std::invalid_argument("propensity weights have size " +
                                std::to_string(propensity.weights.size()) +
                                ", expected " + std::to_string(n_covariates));
  }
  if (outcome.weights.size() != n_covariates) {
    throw std::invalid_argument("outcome weights have size " +
                                std::to_string(outcome.weights.size()) +
                                ", expected " + std::to_string(n_covariates));
  }
}

double error_prob(double tau, int a_obs, int a_true) {
  check_tau(tau, "tau");
  check_binary_arg(a_obs, "a_obs");
  check_binary_arg(a_true, "a_true");
  if (a_true == 0) {
    return a_obs == 0 ? 1.0 : 0.0;  // nothing to underreport
  }
  return a_obs == 1 ? 1.0 - tau : tau;
}

double propensity_prob(const PropensityParams& params,
                       const Eigen::Ref<const Vector>& x) {
  if (x.size() != params.weights.size()) {
    throw std::invalid_argument("propensity_prob: covariate size mismatch");
  }
  return inverse_link(params.link, params.intercept + params.weights.dot(x));
}

double outcome_prob(const OutcomeParams& params, int a,
                    const Eigen::Ref<const Vector>& x, int y) {
  check_binary_arg(a, "a");
  check_binary_arg(y, "y");
  if (x.size() != params.weights.size()) {
    throw std::invalid_argument("outcome_prob: covariate size mismatch");
  }
  double eta = params.intercept + params.weights.dot(x) +
               (a == 1 ? params.exposure_coef : 0.0);
  double p1 = inverse_link(params.link, eta);
  return y == 1 ? p1 : 1.0 - p1;
}

double joint_conditional(const FullParams& params,
                         const Eigen::Ref<const Vector>& x, int a_obs, int y) {
  if (params.error.dual()) {
    throw std::invalid_argument(
        "joint_conditional: dual error rates supplied for single-report data");
  }
  check_binary_arg(a_obs, "a_obs");
  double pi = propensity_prob(params.propensity, x);
  double s = 0.0;
  for (int a = 0; a <= 1; ++a) {
    double prior = a == 1 ? pi : 1.0 - pi;
    s += error_prob(params.error.tau1, a_obs, a) * prior *
         outcome_prob(params.outcome, a, x, y);
  }
  return s;
}

double joint_conditional(const FullParams& params,
                         const Eigen::Ref<const Vector>& x, int a_obs,
                         int a_obs2, int y) {
  if (!params.error.dual()) {
    throw std::invalid_argument(
        "joint_conditional: single error rate supplied for dual-report data");
  }
  check_binary_arg(a_obs, "a_obs");
  check_binary_arg(a_obs2, "a_obs2");
  double pi = propensity_prob(params.propensity, x);
  double s = 0.0;
  for (int a = 0; a <= 1; ++a) {
    double prior = a == 1 ? pi : 1.0 - pi;
    s += error_prob(params.error.tau1, a_obs, a) *
         error_prob(*params.error.tau2, a_obs2, a) * prior *
         outcome_prob(params.outcome, a, x, y);
  }
  return s;
}

}  // namespace underreport
