#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "herglotz/triple.hpp"

namespace herglotz {

/// Heights eps_k = 2^-k, k = k_min..k_max, of the horizontal lines on which
/// boundary values are sampled. Limits are extrapolated from the last
/// fit_points entries (the smallest eps) with a model m + c eps^2.
struct EpsSchedule {
  int k_min = 10;
  int k_max = 40;
  int fit_points = 5;

  void validate() const {
    if (k_min >= k_max) throw std::invalid_argument("EpsSchedule: requires k_min < k_max");
    if (fit_points < 2 || fit_points > k_max - k_min + 1)
      throw std::invalid_argument("EpsSchedule: fit_points must be in [2, k_max - k_min + 1]");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> eps;
    for (int k = k_min; k <= k_max; ++k) eps.push_back(std::ldexp(1.0, -k));
    return eps;
  }

  std::vector<double> fit_values() const {
    const std::vector<double> all = values();
    return {all.end() - fit_points, all.end()};
  }
};

namespace detail {

/// Intercept of the least-squares line y = m + c x.
inline double intercept(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return my - slope * mx;
}

template <HerglotzEvaluable G>
Complex checked_eval(const G& g, Complex z) {
  const Complex value = g(z);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw std::domain_error("recovery: non-finite evaluation at z = (" +
                            std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  return value;
}

/// Extrapolates sample(eps) to eps -> 0 along the schedule.
template <class Sample>
double extrapolate(const EpsSchedule& s, Sample&& sample) {
  std::vector<double> x, y;
  for (double eps : s.fit_values()) {
    x.push_back(eps * eps);
    y.push_back(sample(eps));
  }
  return intercept(x, y);
}

}  // namespace detail

/// Density of the absolutely continuous part of g's measure at lambda,
/// lim (1/pi) Im g(lambda + i eps).
template <HerglotzEvaluable G>
double ac_density_estimate(const G& g, double lambda, const EpsSchedule& s = {}) {
  return detail::extrapolate(s, [&](double eps) {
    return detail::checked_eval(g, Complex(lambda, eps)).imag() / std::numbers::pi;
  });
}

/// Mass of the atom of g's measure at lambda (0 if there is none),
/// lim eps Im g(lambda + i eps). The error is O(eps^2).
template <HerglotzEvaluable G>
double atom_mass_estimate(const G& g, double lambda, const EpsSchedule& s = {}) {
  return detail::extrapolate(s, [&](double eps) {
    return eps * detail::checked_eval(g, Complex(lambda, eps)).imag();
  });
}

/// alpha = lim Im g(iy)/y as y -> inf, sampled at y = 1/eps.
template <HerglotzEvaluable G>
double recover_alpha(const G& g, const EpsSchedule& s = {}) {
  const double alpha = detail::extrapolate(s, [&](double eps) {
    return eps * detail::checked_eval(g, Complex(0.0, 1.0 / eps)).imag();
  });
  if (alpha < -1e-9)
    throw std::runtime_error("recover_alpha: negative linear coefficient " + std::to_string(alpha) +
                             ", not a Herglotz function");
  return alpha < 0.0 ? 0.0 : alpha;
}

/// beta = Re g(i); exact since the regularized kernel is imaginary at i.
template <HerglotzEvaluable G>
double recover_beta(const G& g) {
  return detail::checked_eval(g, Complex(0.0, 1.0)).real();
}

}  // namespace herglotz
