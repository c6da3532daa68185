#pragma once

#include <functional>

#include "underreport/model.hpp"

namespace underreport {

struct LbfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-6;  // infinity norm of the gradient
  int history = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 60;
};

enum class LbfgsStatus {
  GradientConverged,
  MaxIterations,
  LineSearchFailed,
  StartNotFinite,
};

struct LbfgsResult {
  Vector x;
  double f = 0.0;
  Vector grad;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  int n_evals = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;

  bool converged() const { return status == LbfgsStatus::GradientConverged; }
};

// objective returns f(x) and fills grad; minimized
using Objective = std::function<double(const Vector&, Vector&)>;

LbfgsResult lbfgs_minimize(const Objective& objective, const Vector& start,
                           const LbfgsOptions& options = {});

}  // namespace underreport
