#include "spinctrl/fitting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace spinctrl {

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params[i];
  throw std::out_of_range("FitResult: no parameter named " + name);
}

double FitResult::uncertainty(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return uncertainties[i];
  throw std::out_of_range("FitResult: no parameter named " + name);
}

namespace {

double chi_squared(const std::vector<double>& t, const std::vector<double>& y,
                   const ModelFunction& model, const std::vector<double>& p) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = model(t[i], p) - y[i];
    chi2 += r * r;
  }
  return chi2;
}

Eigen::MatrixXd jacobian(const std::vector<double>& t,
                         const ModelFunction& model, std::vector<double> p) {
  const Eigen::Index m = static_cast<Eigen::Index>(t.size());
  const Eigen::Index k = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd j(m, k);
  for (Eigen::Index col = 0; col < k; ++col) {
    const double saved = p[col];
    const double h = 1e-7 * std::abs(saved) + 1e-12;
    p[col] = saved + h;
    std::vector<double> hi(m);
    for (Eigen::Index row = 0; row < m; ++row) hi[row] = model(t[row], p);
    p[col] = saved - h;
    for (Eigen::Index row = 0; row < m; ++row)
      j(row, col) = (hi[row] - model(t[row], p)) / (2.0 * h);
    p[col] = saved;
  }
  return j;
}

}  // namespace

FitResult fit_least_squares(const std::vector<double>& t,
                            const std::vector<double>& y,
                            const ModelFunction& model,
                            const std::vector<double>& initial,
                            const std::vector<std::string>& names,
                            const FitOptions& opts) {
  if (t.size() != y.size())
    throw std::invalid_argument("fit_least_squares: t and y sizes differ");
  if (initial.size() != names.size())
    throw std::invalid_argument("fit_least_squares: parameter count mismatch");
  const std::size_t m = t.size();
  const std::size_t k = initial.size();
  if (m < k)
    throw std::invalid_argument("fit_least_squares: fewer points than params");

  std::vector<double> p = initial;
  double lambda = opts.initial_damping;
  double chi2 = chi_squared(t, y, model, p);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd j = jacobian(t, model, p);
    Eigen::VectorXd r(m);
    for (std::size_t i = 0; i < m; ++i) r(i) = y[i] - model(t[i], p);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;

    bool stepped = false;
    double new_chi2 = chi2;
    while (lambda < 1e14) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index d = 0; d < damped.rows(); ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-30);
      const Eigen::VectorXd delta = damped.ldlt().solve(jtr);
      std::vector<double> trial = p;
      for (std::size_t i = 0; i < k; ++i) trial[i] += delta(i);
      const double trial_chi2 = chi_squared(t, y, model, trial);
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        p = trial;
        new_chi2 = trial_chi2;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      converged = chi2 < 1e-20;  // stuck; accept only a numerically exact fit
      break;
    }
    const double drop = chi2 - new_chi2;
    chi2 = new_chi2;
    if (drop <= opts.tolerance * std::max(chi2, 1e-300)) {
      converged = true;
      break;
    }
  }

  FitResult result;
  result.names = names;
  result.params = p;
  result.converged = converged && std::isfinite(chi2);
  result.residual = std::sqrt(chi2 / m);
  result.uncertainties.assign(k, 0.0);
  if (m > k) {
    const Eigen::MatrixXd j = jacobian(t, model, p);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const double sigma2 = chi2 / (m - k);
    const Eigen::MatrixXd cov =
        sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    for (std::size_t i = 0; i < k; ++i)
      result.uncertainties[i] = std::sqrt(std::max(cov(i, i), 0.0));
  }
  return result;
}

}  // namespace spinctrl
