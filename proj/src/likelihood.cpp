#include "underreport/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "underreport/exact_sum.hpp"

namespace underreport {

namespace {

// Rows whose marginal probability falls below this floor contribute a flat
// log(kJointFloor) (about -27.6) and a zero gradient, which keeps one
// impossible-looking row from dragging the whole objective to -inf.
constexpr double kJointFloor = 1e-12;

// Derivative of the *clamped* inverse link: zero on the clamp plateaus, so
// the analytic gradient differentiates exactly the function the likelihood
// computes (probit reaches the clamp already near |eta| = 7).
double clamped_link_derivative(Link link, double eta, const LinkPair& pair) {
  if (pair.clamped) return 0.0;
  return inverse_link_derivative(link, eta);
}

void check_compat(const UnconstrainedParams& params, const Dataset& data) {
  data.validate();
  if (params.fixed_tau) {
    if (params.eta_tau.size() != 0) {
      throw std::invalid_argument(
          "fixed error rate excludes free eta_tau coordinates");
    }
    if (!(*params.fixed_tau >= 0.0 && *params.fixed_tau < 1.0)) {
      throw std::invalid_argument("fixed tau must lie in [0, 1)");
    }
    if (data.dual()) {
      throw std::invalid_argument(
          "fixed-tau fitting is defined for single-report data");
    }
  } else if (params.eta_tau.size() == 1) {
    if (data.dual()) {
      throw std::invalid_argument(
          "dual-report data needs two eta_tau coordinates");
    }
  } else if (params.eta_tau.size() == 2) {
    if (!data.dual()) {
      throw std::invalid_argument(
          "two eta_tau coordinates need dual-report data");
    }
  } else {
    throw std::invalid_argument("eta_tau must have 0, 1, or 2 entries");
  }
  Eigen::Index d = data.n_covariates();
  if (params.phi_flat.size() != d + 1) {
    throw std::invalid_argument("phi block has size " +
                                std::to_string(params.phi_flat.size()) +
                                ", expected " + std::to_string(d + 1));
  }
  if (params.theta_flat.size() != d + 2) {
    throw std::invalid_argument("theta block has size " +
                                std::to_string(params.theta_flat.size()) +
                                ", expected " + std::to_string(d + 2));
  }
  if (!params.phi_flat.allFinite() || !params.theta_flat.allFinite() ||
      !params.eta_tau.allFinite()) {
    throw std::invalid_argument("parameters contain non-finite entries");
  }
}

// shared single pass; grad may be null
double evaluate(const UnconstrainedParams& params, const Dataset& data,
                Vector* grad) {
  check_compat(params, data);
  const Eigen::Index n = data.n_rows();
  const Eigen::Index d = data.n_covariates();
  const bool dual = data.dual();
  const bool free_tau = !params.fixed_tau.has_value();

  // (tau, 1 - tau) without cancellation; for a user-pinned tau the direct
  // subtraction is already exact to half an ulp
  LinkPair tau1p{0.0, 1.0, false}, tau2p{0.0, 1.0, false};
  if (params.fixed_tau) {
    tau1p.p = *params.fixed_tau;
    tau1p.complement = 1.0 - *params.fixed_tau;
  } else {
    tau1p = inverse_link_pair(Link::Logit, params.eta_tau[0]);
  }
  if (dual) tau2p = inverse_link_pair(Link::Logit, params.eta_tau[1]);

  const double phi0 = params.phi_flat[0];
  const double theta0 = params.theta_flat[0];
  const double theta_a = params.theta_flat[d + 1];
  auto phi_w = params.phi_flat.segment(1, d);
  auto theta_w = params.theta_flat.segment(1, d);

  Vector eta_phi = (data.x * phi_w).array() + phi0;
  Vector eta_th0 = (data.x * theta_w).array() + theta0;

  Vector c_phi, t_sum, t_one;
  if (grad) {
    c_phi = Vector::Zero(n);
    t_sum = Vector::Zero(n);
    t_one = Vector::Zero(n);
  }
  double d_tau1 = 0.0, d_tau2 = 0.0;

  ExactSum loglik;
  for (Eigen::Index i = 0; i < n; ++i) {
    LinkPair pi = inverse_link_pair(params.link_propensity, eta_phi[i]);
    double eta1 = eta_th0[i] + theta_a;
    LinkPair mu0 = inverse_link_pair(params.link_outcome, eta_th0[i]);
    LinkPair mu1 = inverse_link_pair(params.link_outcome, eta1);
    int y = data.y[i];
    double q0 = y == 1 ? mu0.p : mu0.complement;
    double q1 = y == 1 ? mu1.p : mu1.complement;

    // reporting factors for each latent exposure value
    int a1 = data.a_obs[i];
    double k0 = a1 == 0 ? 1.0 : 0.0;
    double k1 = a1 == 1 ? tau1p.complement : tau1p.p;
    double k20 = 1.0, k21 = 1.0;
    if (dual) {
      int a2 = (*data.a_obs2)[i];
      k20 = a2 == 0 ? 1.0 : 0.0;
      k21 = a2 == 1 ? tau2p.complement : tau2p.p;
    }
    double w0 = k0 * k20;
    double w1 = k1 * k21;

    double s = w0 * pi.complement * q0 + w1 * pi.p * q1;
    if (s <= kJointFloor) {
      loglik.add(std::log(kJointFloor));
      continue;  // flat region, no gradient contribution
    }
    loglik.add(std::log(s));

    if (!grad) continue;
    double r = 1.0 / s;
    if (free_tau) {
      // dK1(1)/dtau1 is +1 when the report is 0 and -1 when it is 1
      double delta1 = a1 == 0 ? 1.0 : -1.0;
      d_tau1 += r * delta1 * k21 * pi.p * q1;
      if (dual) {
        double delta2 = (*data.a_obs2)[i] == 0 ? 1.0 : -1.0;
        d_tau2 += r * delta2 * k1 * pi.p * q1;
      }
    }
    double g_phi =
        clamped_link_derivative(params.link_propensity, eta_phi[i], pi);
    c_phi[i] = r * g_phi * (w1 * q1 - w0 * q0);
    double sign = y == 1 ? 1.0 : -1.0;
    double t0 = r * w0 * pi.complement * sign *
                clamped_link_derivative(params.link_outcome, eta_th0[i], mu0);
    double t1 = r * w1 * pi.p * sign *
                clamped_link_derivative(params.link_outcome, eta1, mu1);
    t_sum[i] = t0 + t1;
    t_one[i] = t1;
  }

  if (grad) {
    grad->resize(params.free_count());
    Eigen::Index at = 0;
    if (free_tau) {
      (*grad)[at++] = d_tau1 * clamped_link_derivative(
                                   Link::Logit, params.eta_tau[0], tau1p);
      if (dual) {
        (*grad)[at++] = d_tau2 * clamped_link_derivative(
                                     Link::Logit, params.eta_tau[1], tau2p);
      }
    }
    (*grad)[at] = c_phi.sum();
    grad->segment(at + 1, d) = data.x.transpose() * c_phi;
    at += d + 1;
    (*grad)[at] = t_sum.sum();
    grad->segment(at + 1, d) = data.x.transpose() * t_sum;
    (*grad)[at + d + 1] = t_one.sum();
  }
  return loglik.value();
}

}  // namespace

Vector UnconstrainedParams::flatten() const {
  Vector u(free_count());
  u << eta_tau, phi_flat, theta_flat;
  return u;
}

void UnconstrainedParams::assign_flat(const Eigen::Ref<const Vector>& u) {
  if (u.size() != free_count()) {
    throw std::invalid_argument("assign_flat: size mismatch");
  }
  Eigen::Index k = eta_tau.size();
  eta_tau = u.head(k);
  phi_flat = u.segment(k, phi_flat.size());
  theta_flat = u.tail(theta_flat.size());
}

FullParams UnconstrainedParams::to_constrained() const {
  FullParams out;
  if (fixed_tau) {
    out.error.tau1 = *fixed_tau;
  } else {
    out.error.tau1 = inverse_link(Link::Logit, eta_tau[0]);
    if (eta_tau.size() == 2) {
      out.error.tau2 = inverse_link(Link::Logit, eta_tau[1]);
    }
  }
  Eigen::Index d = n_covariates();
  out.propensity.intercept = phi_flat[0];
  out.propensity.weights = phi_flat.segment(1, d);
  out.propensity.link = link_propensity;
  out.outcome.intercept = theta_flat[0];
  out.outcome.weights = theta_flat.segment(1, d);
  out.outcome.exposure_coef = theta_flat[d + 1];
  out.outcome.link = link_outcome;
  return out;
}

UnconstrainedParams UnconstrainedParams::from_constrained(
    const FullParams& params, bool fix_tau) {
  Eigen::Index d = params.propensity.weights.size();
  params.validate(d);
  UnconstrainedParams out;
  out.link_propensity = params.propensity.link;
  out.link_outcome = params.outcome.link;
  if (fix_tau) {
    if (params.error.dual()) {
      throw std::invalid_argument(
          "fixed-tau parameters cannot carry a second error rate");
    }
    out.fixed_tau = params.error.tau1;
    out.eta_tau.resize(0);
  } else {
    out.eta_tau.resize(params.error.dual() ? 2 : 1);
    out.eta_tau[0] = apply_link(Link::Logit, params.error.tau1);
    if (params.error.dual()) {
      out.eta_tau[1] = apply_link(Link::Logit, *params.error.tau2);
    }
  }
  out.phi_flat.resize(d + 1);
  out.phi_flat[0] = params.propensity.intercept;
  out.phi_flat.segment(1, d) = params.propensity.weights;
  out.theta_flat.resize(d + 2);
  out.theta_flat[0] = params.outcome.intercept;
  out.theta_flat.segment(1, d) = params.outcome.weights;
  out.theta_flat[d + 1] = params.outcome.exposure_coef;
  return out;
}

double log_likelihood(const UnconstrainedParams& params, const Dataset& data) {
  return evaluate(params, data, nullptr);
}

Vector gradient(const UnconstrainedParams& params, const Dataset& data) {
  Vector g;
  evaluate(params, data, &g);
  return g;
}

double log_likelihood_gradient(const UnconstrainedParams& params,
                               const Dataset& data, Vector& grad) {
  return evaluate(params, data, &grad);
}

Vector central_difference(const std::function<double(const Vector&)>& f,
                          const Vector& u0, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  Vector u = u0;
  Vector g(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    double saved = u[j];
    u[j] = saved + step;
    double up = f(u);
    u[j] = saved - step;
    double down = f(u);
    u[j] = saved;
    g[j] = (up - down) / (2.0 * step);
  }
  return g;
}

Vector fd_gradient_oracle(const UnconstrainedParams& params,
                          const Dataset& data, double step) {
  UnconstrainedParams work = params;
  auto value = [&](const Vector& u) {
    work.assign_flat(u);
    return log_likelihood(work, data);
  };
  return central_difference(value, params.flatten(), step);
}

}  // namespace underreport
