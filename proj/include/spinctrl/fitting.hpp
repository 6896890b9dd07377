// Deterministic damped least-squares fitting with named parameters.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spinctrl {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> uncertainties;  // 1-sigma, from the residual covariance
  double residual = 0.0;              // rms of (model - data)
  bool converged = false;

  double param(const std::string& name) const;
  double uncertainty(const std::string& name) const;
};

/// Model value at sample t given the parameter vector.
using ModelFunction =
    std::function<double(double, const std::vector<double>&)>;

struct FitOptions {
  int max_iterations = 400;
  double tolerance = 1e-13;  // relative chi^2 improvement considered converged
  double initial_damping = 1e-3;
};

/// Levenberg-Marquardt with a numeric Jacobian.  Deterministic: no random
/// restarts, fixed step rules.
FitResult fit_least_squares(const std::vector<double>& t,
                            const std::vector<double>& y,
                            const ModelFunction& model,
                            const std::vector<double>& initial,
                            const std::vector<std::string>& names,
                            const FitOptions& opts = {});

}  // namespace spinctrl
