#include "spinctrl/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "spinctrl/errors.hpp"

namespace spinctrl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double value_range(const std::vector<double>& y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo;
}

double mean(const std::vector<double>& y) {
  return std::accumulate(y.begin(), y.end(), 0.0) / y.size();
}

}  // namespace

FitResult fit_stretched_exponential(const std::vector<double>& t,
                                    const std::vector<double>& y) {
  if (t.size() != y.size())
    throw std::invalid_argument("fit_stretched_exponential: size mismatch");
  const std::size_t m = t.size();
  if (m < 5)
    throw std::invalid_argument("fit_stretched_exponential: need >= 5 points");
  const double range = value_range(y);
  if (range <= 1e-12 * (std::abs(y.front()) + 1.0))
    throw FitDiverged("fit_stretched_exponential: constant data");

  std::size_t i_first = 0, i_last = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t[i] < t[i_first]) i_first = i;
    if (t[i] > t[i_last]) i_last = i;
  }
  const double c0 = y[i_last];
  double a0 = y[i_first] - c0;
  if (std::abs(a0) < 0.1 * range) a0 = range;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  double tau0 = 0.0;
  for (std::size_t idx : order) {
    if (std::abs(y[idx] - c0) <= std::abs(a0) / std::numbers::e && t[idx] > 0) {
      tau0 = t[idx];
      break;
    }
  }
  if (tau0 <= 0.0) tau0 = 0.5 * (t[i_first] + t[i_last]);
  if (tau0 <= 0.0) tau0 = t[i_last];

  auto model = [](double tt, const std::vector<double>& p) {
    const double tau = std::max(std::abs(p[1]), 1e-300);
    const double n = std::max(std::abs(p[2]), 1e-12);
    return p[0] * std::exp(-std::pow(std::max(tt, 0.0) / tau, n)) + p[3];
  };
  FitResult result = fit_least_squares(
      t, y, model, {a0, tau0, 1.5, c0},
      {"amplitude", "tau_s", "exponent", "offset"});
  result.params[1] = std::abs(result.params[1]);
  result.params[2] = std::abs(result.params[2]);
  if (!result.converged || std::abs(result.params[0]) < 1e-8 * range)
    throw FitDiverged("fit_stretched_exponential: fit did not converge");
  return result;
}

FitResult fit_dd_scaling(const std::vector<double>& n_pulses,
                         const std::vector<double>& t2_seconds) {
  if (n_pulses.size() != t2_seconds.size())
    throw std::invalid_argument("fit_dd_scaling: size mismatch");
  const std::size_t m = n_pulses.size();
  if (m < 2) throw std::invalid_argument("fit_dd_scaling: need >= 2 points");
  std::vector<double> x(m), z(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (n_pulses[i] < 1.0 || t2_seconds[i] <= 0.0)
      throw std::invalid_argument("fit_dd_scaling: N >= 1 and T2 > 0 required");
    x[i] = std::log(n_pulses[i]);
    z[i] = std::log(t2_seconds[i]);
  }
  const double xbar = mean(x);
  const double zbar = mean(z);
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxz += (x[i] - xbar) * (z[i] - zbar);
  }
  if (sxx <= 1e-24)
    throw FitDiverged("fit_dd_scaling: a single pulse number cannot fix chi");
  const double chi = sxz / sxx;
  const double intercept = zbar - chi * xbar;

  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = z[i] - (intercept + chi * x[i]);
    sse += e * e;
  }
  const double sigma2 = m > 2 ? sse / (m - 2) : 0.0;
  FitResult result;
  result.names = {"t2_echo_s", "chi"};
  result.params = {std::exp(intercept), chi};
  result.uncertainties = {
      std::exp(intercept) * std::sqrt(sigma2 * (1.0 / m + xbar * xbar / sxx)),
      std::sqrt(sigma2 / sxx)};
  result.residual = std::sqrt(sse / m);
  result.converged = true;
  return result;
}

namespace {

struct ToneGuess {
  std::vector<double> freqs_hz;
};

/// Direct periodogram |sum (y - c) e^{-2 pi i f t}| on a frequency grid.
std::vector<double> periodogram(const std::vector<double>& t,
                                const std::vector<double>& y, double c0,
                                const std::vector<double>& grid) {
  std::vector<double> power(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
      acc += (y[i] - c0) *
             std::exp(std::complex<double>(0.0, -kTwoPi * grid[g] * t[i]));
    power[g] = std::abs(acc);
  }
  return power;
}

std::vector<double> pick_peaks(const std::vector<double>& grid,
                               const std::vector<double>& power, int n_tones) {
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < power.size(); ++i)
    if (power[i] > power[i - 1] && power[i] >= power[i + 1])
      maxima.push_back(i);
  if (maxima.empty())
    maxima.push_back(std::max_element(power.begin(), power.end()) -
                     power.begin());
  std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
    return power[a] > power[b];
  });
  const double step = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  std::vector<double> picked;
  for (std::size_t idx : maxima) {
    bool separated = true;
    for (double f : picked)
      if (std::abs(grid[idx] - f) < 3.0 * step) separated = false;
    if (separated) picked.push_back(grid[idx]);
    if (static_cast<int>(picked.size()) == n_tones) break;
  }
  // Under-resolved tones: split the strongest peak symmetrically.
  while (static_cast<int>(picked.size()) < n_tones) {
    const double split = 1.5 * step * picked.size();
    picked.push_back(picked.front() + split);
    if (static_cast<int>(picked.size()) < n_tones)
      picked.push_back(std::max(picked.front() - split, grid.front()));
  }
  picked.resize(n_tones);
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

FitResult ramsey_model_fit(const std::vector<double>& t,
                           const std::vector<double>& y,
                           const RamseyFitOptions& opts) {
  const int k = opts.n_tones;
  if (k < 1 || k > 2)
    throw std::invalid_argument("ramsey_model_fit: n_tones must be 1 or 2");
  if (t.size() != y.size())
    throw std::invalid_argument("ramsey_model_fit: size mismatch");
  const std::size_t m = t.size();
  const std::size_t n_params = 4 + 2 * static_cast<std::size_t>(k);
  if (m < n_params + 2)
    throw std::invalid_argument("ramsey_model_fit: too few samples");
  const double range = value_range(y);
  if (range <= 1e-12 * (std::abs(y.front()) + 1.0))
    throw FitDiverged("ramsey_model_fit: constant data carries no tone");

  const double c0 = mean(y);
  double a_peak = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    a_peak = std::max(a_peak, std::abs(y[i] - c0));
  const auto [t_lo_it, t_hi_it] = std::minmax_element(t.begin(), t.end());
  const double span = *t_hi_it - *t_lo_it;
  if (span <= 0.0)
    throw std::invalid_argument("ramsey_model_fit: zero time span");
  double t2_0 = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(y[i] - c0) >= a_peak / std::numbers::e)
      t2_0 = std::max(t2_0, t[i]);
  if (t2_0 <= 0.0) t2_0 = 0.5 * span;

  // Smallest positive sample spacing bounds the searchable band.
  std::vector<double> ts = t;
  std::sort(ts.begin(), ts.end());
  double dt_min = span;
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i] - ts[i - 1] > 0.0) dt_min = std::min(dt_min, ts[i] - ts[i - 1]);
  double f_lo = 0.25 / span;
  double f_hi = 0.5 / dt_min;
  if (opts.frequency_bracket_hi_hz > opts.frequency_bracket_lo_hz &&
      opts.frequency_bracket_hi_hz > 0.0) {
    f_lo = std::max(opts.frequency_bracket_lo_hz, 1e-12);
    f_hi = opts.frequency_bracket_hi_hz;
  }
  const int grid_n = 4001;
  std::vector<double> grid(grid_n);
  for (int i = 0; i < grid_n; ++i)
    grid[i] = f_lo + (f_hi - f_lo) * i / (grid_n - 1.0);
  const std::vector<double> power = periodogram(t, y, c0, grid);
  const std::vector<double> peaks = pick_peaks(grid, power, k);
  const double grid_step = grid[1] - grid[0];

  auto model = [k](double tt, const std::vector<double>& p) {
    const double tau = std::max(std::abs(p[1]), 1e-300);
    const double n = std::max(std::abs(p[2]), 1e-12);
    const double env = std::exp(-std::pow(std::max(tt, 0.0) / tau, n));
    double s = 0.0;
    for (int i = 0; i < k; ++i)
      s += std::sin(kTwoPi * p[4 + 2 * i] * tt + p[5 + 2 * i]);
    return p[0] * env * s + p[3];
  };

  std::vector<std::string> names{"amplitude", "t2_star_s", "exponent",
                                 "offset"};
  for (int i = 0; i < k; ++i) {
    names.push_back("freq" + std::to_string(i) + "_hz");
    names.push_back("phase" + std::to_string(i) + "_rad");
  }

  // Phase/amplitude seed: linear solve with the envelope frozen, then a full
  // nonlinear refinement; several deterministic frequency starts.
  auto initial_for = [&](const std::vector<double>& freqs) {
    Eigen::MatrixXd design(m, 2 * k + 1);
    for (std::size_t i = 0; i < m; ++i) {
      const double env =
          std::exp(-std::pow(std::max(t[i], 0.0) / t2_0, 2.0));
      for (int j = 0; j < k; ++j) {
        design(i, 2 * j) = env * std::sin(kTwoPi * freqs[j] * t[i]);
        design(i, 2 * j + 1) = env * std::cos(kTwoPi * freqs[j] * t[i]);
      }
      design(i, 2 * k) = 1.0;
    }
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs(i) = y[i];
    const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
    std::vector<double> p{0.0, t2_0, 2.0, sol(2 * k)};
    double amp = 0.0;
    for (int j = 0; j < k; ++j)
      amp += std::hypot(sol(2 * j), sol(2 * j + 1));
    amp /= k;
    // Nearly collinear tone columns blow the linear solution up into a pair
    // of large cancelling amplitudes; discard it in that case.
    const bool pathological = !(amp < 5.0 * range);
    p[0] = std::clamp(amp, 1e-3 * range, 2.0 * range);
    for (int j = 0; j < k; ++j) {
      p.push_back(freqs[j]);
      p.push_back(pathological ? 0.0
                               : std::atan2(sol(2 * j + 1), sol(2 * j)));
    }
    if (pathological) p[3] = c0;
    return p;
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(peaks);
  std::vector<double> up = peaks, down = peaks;
  for (double& f : up) f += 0.5 * grid_step;
  for (double& f : down) f = std::max(f - 0.5 * grid_step, f_lo);
  starts.push_back(up);
  starts.push_back(down);
  if (k == 2) {
    // A doublet closer than the spectral resolution shows up as a single
    // peak; seed symmetric splits of increasing width around it.
    const double f_main =
        grid[std::max_element(power.begin(), power.end()) - power.begin()];
    for (double w : {2.0, 4.0, 8.0, 16.0, 32.0})
      starts.push_back({std::max(f_main - 0.5 * w * grid_step, f_lo),
                        f_main + 0.5 * w * grid_step});
  }

  FitResult best;
  bool have_best = false;
  for (const auto& freqs : starts) {
    std::vector<std::vector<double>> initials{initial_for(freqs)};
    std::vector<double> plain{0.5 * range, t2_0, 2.0, c0};
    for (double f : freqs) {
      plain.push_back(f);
      plain.push_back(0.0);
    }
    initials.push_back(std::move(plain));
    for (const auto& initial : initials) {
      const FitResult trial = fit_least_squares(t, y, model, initial, names);
      const bool better =
          !have_best || (trial.converged && !best.converged) ||
          (trial.converged == best.converged && trial.residual < best.residual);
      if (better) {
        best = trial;
        have_best = true;
      }
    }
  }
  if (!best.converged || std::abs(best.params[0]) < 1e-8 * range)
    throw FitDiverged("ramsey_model_fit: fit did not converge");

  // Canonical form: positive amplitude and frequencies, tones in ascending
  // frequency order, phases wrapped to (-pi, pi].
  best.params[1] = std::abs(best.params[1]);
  best.params[2] = std::abs(best.params[2]);
  if (best.params[0] < 0.0) {
    best.params[0] = -best.params[0];
    for (int i = 0; i < k; ++i) best.params[5 + 2 * i] += std::numbers::pi;
  }
  for (int i = 0; i < k; ++i) {
    double& f = best.params[4 + 2 * i];
    double& ph = best.params[5 + 2 * i];
    if (f < 0.0) {
      f = -f;
      ph = std::numbers::pi - ph;
    }
    ph = std::remainder(ph, kTwoPi);
  }
  if (k == 2 && best.params[4] > best.params[6]) {
    std::swap(best.params[4], best.params[6]);
    std::swap(best.params[5], best.params[7]);
    std::swap(best.uncertainties[4], best.uncertainties[6]);
    std::swap(best.uncertainties[5], best.uncertainties[7]);
  }
  return best;
}

double gate_fidelity_from_contrast(double sigma_x_amplitude) {
  if (sigma_x_amplitude < 0.0 || sigma_x_amplitude > 1.0)
    throw OutOfRange("gate_fidelity_from_contrast: contrast outside [0, 1]");
  return 0.5 * (1.0 + std::sqrt(sigma_x_amplitude));
}

Correlators readout_correct(const Correlators& measured, double f0, double f1,
                            double nuclear_gate_fidelity) {
  for (double f : {f0, f1, nuclear_gate_fidelity})
    if (f <= 0.5 || f > 1.0)
      throw OutOfRange("readout_correct: fidelities must lie in (0.5, 1]");
  const double electron = f0 + f1 - 1.0;
  const double nuclear = 2.0 * nuclear_gate_fidelity - 1.0;
  const double scale = 1.0 / (electron * nuclear * nuclear);
  auto correct = [&](const Measurement& in) {
    Measurement out{in.value * scale, in.error * scale};
    if (std::abs(out.value) > 1.0 + out.error + 1e-12)
      throw OutOfRange("readout_correct: corrected correlator outside [-1, 1]");
    return out;
  };
  return {correct(measured.xx), correct(measured.yy), correct(measured.zz)};
}

Measurement bell_fidelity(const Correlators& c) {
  Measurement out;
  out.value = 0.25 * (c.xx.value - c.yy.value + c.zz.value + 1.0);
  out.error = 0.25 * std::sqrt(c.xx.error * c.xx.error +
                               c.yy.error * c.yy.error +
                               c.zz.error * c.zz.error);
  return out;
}

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Cx = std::complex<double>;

Mat2 rot_x(double angle) {  // exp(-i angle sigma_x / 2)
  Mat2 u;
  const Cx c(std::cos(0.5 * angle), 0.0);
  const Cx s(0.0, -std::sin(0.5 * angle));
  u << c, s, s, c;
  return u;
}

Mat2 rot_z(double angle) {  // exp(-i angle sigma_z / 2)
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(Cx(0.0, -0.5 * angle));
  u(1, 1) = std::exp(Cx(0.0, 0.5 * angle));
  return u;
}

Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

double error_budget_bell(double f_gate) {
  const double half_pi = 0.5 * std::numbers::pi;
  Mat4 gate = Mat4::Zero();
  gate.block<2, 2>(0, 0) = rot_x(half_pi);   // electron |0>: +pi/2 about x
  gate.block<2, 2>(2, 2) = rot_x(-half_pi);  // electron |1>: -pi/2 about x
  Mat2 sz = Mat2::Zero();
  sz(0, 0) = Cx(1.0, 0.0);
  sz(1, 1) = Cx(-1.0, 0.0);
  const Mat4 ze = kron2(sz, Mat2::Identity());
  Mat2 plus;
  plus << Cx(0.5, 0.0), Cx(0.5, 0.0), Cx(0.5, 0.0), Cx(0.5, 0.0);
  Mat2 proj_y;  // |+y><+y|
  proj_y << Cx(0.5, 0.0), Cx(0.0, -0.5), Cx(0.0, 0.5), Cx(0.5, 0.0);

  auto pipeline = [&](double p) {
    auto noisy_gate = [&](const Mat4& rho) {
      const Mat4 applied = gate * rho * gate.adjoint();
      return Mat4(p * applied + (1.0 - p) * ze * applied * ze);
    };
    // Measurement-based initialization: entangle with a maximally mixed
    // nucleus, project the electron onto |+y>, keep the nuclear state.
    Mat4 rho = kron2(plus, 0.5 * Mat2::Identity());
    rho = noisy_gate(rho);
    const Mat4 projected = kron2(proj_y, Mat2::Identity()) * rho *
                           kron2(proj_y, Mat2::Identity());
    Mat2 nucleus = Mat2::Zero();
    for (int e = 0; e < 2; ++e)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          nucleus(i, j) += projected(2 * e + i, 2 * e + j);
    nucleus /= nucleus.trace();
    // Ideal quarter turn about z aligns the initialized state for the
    // entangling gate (x -> y), then entangle with a fresh electron.
    const Mat2 w = rot_z(half_pi);
    nucleus = w * nucleus * w.adjoint();
    rho = kron2(plus, nucleus);
    return noisy_gate(rho);
  };

  const Mat4 rho = pipeline(f_gate);
  const Mat4 ideal = pipeline(1.0);
  return (ideal * rho).trace().real();
}

double excited_state_fraction(double s) {
  if (s < 0.0)
    throw std::invalid_argument("excited_state_fraction: s must be >= 0");
  return s / (2.0 * s + 1.0);
}

double binned_ramsey_phase(double t_readout, double s, double delta_a,
                           ReadoutTransition transition) {
  if (t_readout < 0.0 || s < 0.0)
    throw std::invalid_argument("binned_ramsey_phase: inputs must be >= 0");
  const double sign = transition == ReadoutTransition::up ? 1.0 : -1.0;
  return sign * delta_a * t_readout * excited_state_fraction(s);
}

double delta_hyperfine(const std::vector<std::pair<double, double>>& points) {
  double distinct_lo = 0.0, distinct_hi = 0.0;
  bool first = true;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [fraction, rate] : points) {
    if (first) {
      distinct_lo = distinct_hi = fraction;
      first = false;
    }
    distinct_lo = std::min(distinct_lo, fraction);
    distinct_hi = std::max(distinct_hi, fraction);
    sxx += fraction * fraction;
    sxy += fraction * rate;
  }
  if (points.size() < 2 || distinct_hi - distinct_lo <= 1e-15 || sxx <= 0.0)
    throw FitDiverged(
        "delta_hyperfine: need two distinct excited-state fractions");
  return sxy / sxx;
}

double field_rescale(double f_mw_reference, double f_mw_now, double omega) {
  if (f_mw_reference <= 0.0 || f_mw_now <= 0.0)
    throw std::invalid_argument("field_rescale: frequencies must be positive");
  return omega * (f_mw_now / f_mw_reference);
}

}  // namespace spinctrl
