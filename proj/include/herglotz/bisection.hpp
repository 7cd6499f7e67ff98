#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace herglotz::detail {

struct BisectionTolerance {
  /// Bracket width below which the residual test is applied.
  double x_tol = 0.0;
  /// Accept the midpoint once |f| <= f_tol and the bracket is narrower than x_tol.
  double f_tol = 0.0;
  int max_iterations = 4096;
};

/// Root of an increasing function on the open interval (lo, hi), where f is
/// known to be negative near lo and positive near hi. The endpoints are never
/// evaluated, so they may be poles. Without a tolerance the bracket is
/// halved until it collapses to adjacent doubles.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, const BisectionTolerance& tol = {}) {
  double best_x = lo + 0.5 * (hi - lo);
  double best_f = std::numeric_limits<double>::infinity();
  for (int it = 0; it < tol.max_iterations; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) return best_x;
    const double fm = f(mid);
    if (std::isnan(fm)) throw std::runtime_error("bisection: function returned NaN");
    if (std::abs(fm) <= best_f) {
      best_f = std::abs(fm);
      best_x = mid;
    }
    if (fm == 0.0) return mid;
    if (hi - lo <= tol.x_tol && std::abs(fm) <= tol.f_tol) return mid;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("bisection: no convergence after " +
                           std::to_string(tol.max_iterations) + " iterations");
}

}  // namespace herglotz::detail
