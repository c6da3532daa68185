#pragma once

#include <string_view>

namespace underreport {

enum class Link { Logit, Probit, Cloglog };

// Inverse-link outputs are clamped into [kProbClamp, 1 - kProbClamp] so that
// downstream logs and ratios stay finite at extreme linear predictors.
inline constexpr double kProbClamp = 1e-12;

// linear predictor -> clamped probability; throws std::domain_error if eta
// is not finite
double inverse_link(Link link, double eta);

// Probability and its complement evaluated without cancellation, so each
// side keeps full relative precision deep into its tail.  Clamped as a
// pair: when either side would fall below kProbClamp, the result snaps to
// (kProbClamp, 1 - kProbClamp) in the appropriate order.  This is what
// likelihood code should use whenever it needs 1 - p of a near-one p.
struct LinkPair {
  double p = 0.5;
  double complement = 0.5;
  bool clamped = false;  // true on the clamp plateaus, where d/deta is 0
};
LinkPair inverse_link_pair(Link link, double eta);

// d/deta of the unclamped inverse link; floored at the smallest positive
// normal double so it stays strictly positive even deep in the tails
double inverse_link_derivative(Link link, double eta);

// probability in (0, 1) -> linear predictor; throws std::domain_error
// outside the open interval
double apply_link(Link link, double p);

// standard normal quantile (Wichura's PPND16 rational approximation),
// p in (0, 1)
double standard_normal_quantile(double p);

// accepts "logit", "probit", "cloglog"; throws std::invalid_argument
Link parse_link(std::string_view name);

const char* link_name(Link link);

}  // namespace underreport
