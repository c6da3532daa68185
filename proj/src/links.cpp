#include "underreport/links.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace underreport {

namespace {

double clamp_prob(double p) {
  if (p < kProbClamp) return kProbClamp;
  if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return p;
}

// exp(-eta) overflows for eta < -745, so branch on the sign
double expit(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  double e = std::exp(eta);
  return e / (1.0 + e);
}

void require_finite(double eta) {
  if (!std::isfinite(eta)) {
    throw std::domain_error("inverse_link: non-finite linear predictor");
  }
}

}  // namespace

double inverse_link(Link link, double eta) {
  require_finite(eta);
  switch (link) {
    case Link::Logit:
      return clamp_prob(expit(eta));
    case Link::Probit:
      return clamp_prob(0.5 * std::erfc(-eta * M_SQRT1_2));
    case Link::Cloglog:
      // 1 - exp(-exp(eta)); expm1 keeps precision for small exp(eta)
      return clamp_prob(-std::expm1(-std::exp(eta)));
  }
  throw std::logic_error("inverse_link: unknown link");
}

LinkPair inverse_link_pair(Link link, double eta) {
  require_finite(eta);
  LinkPair out;
  switch (link) {
    case Link::Logit:
      out.p = expit(eta);
      out.complement = expit(-eta);
      break;
    case Link::Probit:
      out.p = 0.5 * std::erfc(-eta * M_SQRT1_2);
      out.complement = 0.5 * std::erfc(eta * M_SQRT1_2);
      break;
    case Link::Cloglog:
      out.p = -std::expm1(-std::exp(eta));
      out.complement = std::exp(-std::exp(eta));
      break;
  }
  if (out.p < kProbClamp) {
    out = {kProbClamp, 1.0 - kProbClamp, true};
  } else if (out.complement < kProbClamp) {
    out = {1.0 - kProbClamp, kProbClamp, true};
  }
  return out;
}

double inverse_link_derivative(Link link, double eta) {
  require_finite(eta);
  double d = 0.0;
  switch (link) {
    case Link::Logit: {
      double e = std::exp(-std::fabs(eta));
      double denom = 1.0 + e;
      d = e / (denom * denom);
      break;
    }
    case Link::Probit: {
      constexpr double inv_sqrt_two_pi = 0.39894228040143267794;
      d = inv_sqrt_two_pi * std::exp(-0.5 * eta * eta);
      break;
    }
    case Link::Cloglog:
      d = std::exp(eta - std::exp(eta));
      break;
  }
  return std::max(d, std::numeric_limits<double>::min());
}

double apply_link(Link link, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("apply_link: probability must lie in (0, 1), got " +
                            std::to_string(p));
  }
  switch (link) {
    case Link::Logit:
      return std::log(p) - std::log1p(-p);
    case Link::Probit:
      return standard_normal_quantile(p);
    case Link::Cloglog:
      return std::log(-std::log1p(-p));
  }
  throw std::logic_error("apply_link: unknown link");
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("standard_normal_quantile: p outside (0, 1)");
  }
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    double num = (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                       67265.770927008700853) * r + 45921.953931549871457) * r +
                     13731.693765509461125) * r + 1971.5909503065514427) * r +
                   133.14166789178437745) * r + 3.387132872796366608);
    double den = (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                       39307.89580009271061) * r + 21213.794301586595867) * r +
                     5394.1960214247511077) * r + 687.1870074920579083) * r +
                   42.313330701600911252) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    double num = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                       0.24178072517745061177) * r + 1.27045825245236838258) * r +
                     3.64784832476320460504) * r + 5.7694972214606914055) * r +
                   4.6303378461565452959) * r + 1.42343711074968357734);
    double den = (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                       0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                     0.68976733498510000455) * r + 1.6763848301838038494) * r +
                   2.05319162663775882187) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                     0.29656057182850489123) * r + 1.7848265399172913358) * r +
                   5.4637849111641143699) * r + 6.6579046435011037772);
    double den = (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                       1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                     0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                   0.59983220655588793769) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

Link parse_link(std::string_view name) {
  if (name == "logit") return Link::Logit;
  if (name == "probit") return Link::Probit;
  if (name == "cloglog") return Link::Cloglog;
  throw std::invalid_argument("unknown link '" + std::string(name) +
                              "' (expected logit, probit, or cloglog)");
}

const char* link_name(Link link) {
  switch (link) {
    case Link::Logit: return "logit";
    case Link::Probit: return "probit";
    case Link::Cloglog: return "cloglog";
  }
  return "?";
}

}  // namespace underreport
