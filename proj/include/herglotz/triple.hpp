#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/bisection.hpp"
#include "herglotz/measure.hpp"

namespace herglotz {

using Complex = std::complex<double>;

/// Anything that evaluates a Herglotz function on the open upper half-plane.
template <class G>
concept HerglotzEvaluable = requires(const G& g, Complex z) {
  { g(z) } -> std::convertible_to<Complex>;
};

/// Atoms of a singular measure at a fixed coupling r.
struct SpectralSample {
  double r = 0.0;
  std::vector<Atom> atoms;

  double total_mass() const {
    double sum = 0.0;
    for (const Atom& at : atoms) sum += at.mass;
    return sum;
  }
};

/// Herglotz function given by its representation triple (alpha, beta, mu):
///
///   h(z) = alpha z + beta + integral (1/(l - z) - l/(l^2 + 1)) dmu(l).
///
/// alpha >= 0 and either alpha > 0 or mu != 0, so that h is nonconstant and
/// (r - h(z))^-1 is again Herglotz for every real r.
class HerglotzTriple {
 public:
  HerglotzTriple(double alpha, double beta, RealMeasure mu)
      : alpha_(alpha), beta_(beta), mu_(std::move(mu)) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
      throw std::invalid_argument("herglotz: alpha and beta must be finite");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (alpha == 0.0 && mu_.empty())
      throw std::invalid_argument("herglotz: constant function (alpha = 0 and mu = 0)");
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const RealMeasure& mu() const { return mu_; }

  Complex operator()(Complex z) const;

  friend bool operator==(const HerglotzTriple&, const HerglotzTriple&) = default;

 private:
  double alpha_;
  double beta_;
  RealMeasure mu_;
};

namespace detail {

inline double regularizer(double p) { return p / (p * p + 1.0); }

/// 1/2 log((1 + b^2) / (1 + a^2)), the slab integral of l/(l^2 + 1).
inline double slab_regularizer(const Slab& s) {
  return 0.5 * (std::log1p(s.b * s.b) - std::log1p(s.a * s.a));
}

inline void require_off_support(const HerglotzTriple& h, double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": x must be finite");
  if (h.mu().in_support(x))
    throw std::domain_error(std::string(what) + ": x = " + std::to_string(x) +
                            " lies in the closed support of mu");
}

}  // namespace detail

/// Evaluates h(z) for Im z > 0. Slabs use the closed form
/// c [log(b - z) - log(a - z)] - c/2 log((1 + b^2)/(1 + a^2)); both b - z and
/// a - z lie in the open lower half-plane, away from the principal cut.
inline Complex eval(const HerglotzTriple& h, Complex z) {
  if (!(z.imag() > 0.0)) throw std::domain_error("eval: requires Im z > 0");
  Complex sum = h.alpha() * z + h.beta();
  for (const Atom& at : h.mu().atoms())
    sum += at.mass * (1.0 / (at.position - z) - detail::regularizer(at.position));
  for (const Slab& s : h.mu().slabs())
    sum += s.height * (std::log(s.b - z) - std::log(s.a - z) - detail::slab_regularizer(s));
  return sum;
}

inline Complex HerglotzTriple::operator()(Complex z) const { return eval(*this, z); }

/// Real boundary value h(x + i0) at a point outside the closed support of mu.
inline double boundary_value(const HerglotzTriple& h, double x) {
  detail::require_off_support(h, x, "boundary_value");
  double sum = h.alpha() * x + h.beta();
  for (const Atom& at : h.mu().atoms())
    sum += at.mass * (1.0 / (at.position - x) - detail::regularizer(at.position));
  for (const Slab& s : h.mu().slabs())
    sum += s.height *
           (std::log(std::abs(s.b - x)) - std::log(std::abs(s.a - x)) - detail::slab_regularizer(s));
  return sum;
}

/// h'(x) outside the closed support of mu; always strictly positive.
inline double derivative(const HerglotzTriple& h, double x) {
  detail::require_off_support(h, x, "derivative");
  double sum = h.alpha();
  for (const Atom& at : h.mu().atoms()) {
    const double d = at.position - x;
    sum += at.mass / (d * d);
  }
  for (const Slab& s : h.mu().slabs())
    sum += s.height * (s.b - s.a) / ((s.a - x) * (s.b - x));
  return sum;
}

struct RealLimits {
  double at_minus_infinity;
  double at_plus_infinity;
};

/// Limits of h(x) as x -> -inf and x -> +inf. For alpha = 0 both equal
/// beta - integral l/(1 + l^2) dmu.
inline RealLimits real_limits(const HerglotzTriple& h) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h.alpha() > 0.0) return {-inf, inf};
  double value = h.beta();
  for (const Atom& at : h.mu().atoms()) value -= at.mass * detail::regularizer(at.position);
  for (const Slab& s : h.mu().slabs()) value -= s.height * detail::slab_regularizer(s);
  return {value, value};
}

/// g_r(z) = (r - h(z))^-1, kept lazily as (base, r).
class TransformedFunction {
 public:
  TransformedFunction(HerglotzTriple base, double r) : base_(std::move(base)), r_(r) {
    if (!std::isfinite(r)) throw std::invalid_argument("transform: r must be finite");
  }

  const HerglotzTriple& base() const { return base_; }
  double r() const { return r_; }

  Complex operator()(Complex z) const { return 1.0 / (r_ - eval(base_, z)); }

 private:
  HerglotzTriple base_;
  double r_;
};

inline TransformedFunction transform(const HerglotzTriple& h, double r) { return {h, r}; }

inline Complex eval(const TransformedFunction& g, Complex z) { return g(z); }

namespace detail {

inline constexpr double kRootXTolerance = 1e-13;
inline constexpr double kRootResidualTolerance = 1e-12;

inline BisectionTolerance root_tolerance(double r) {
  return {kRootXTolerance, kRootResidualTolerance * std::max(1.0, std::abs(r)), 4096};
}

}  // namespace detail

/// Real solutions of h(l) = r together with masses 1/h'(l): the atoms of the
/// measure of g_r. Every maximal interval outside the closed support of mu
/// contributes at most one root since h increases across it; intervals
/// inside slabs contribute none.
inline SpectralSample solve_h_equals_r(const HerglotzTriple& h, double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("solve_h_equals_r: r must be finite");
  SpectralSample sample{r, {}};
  const auto f = [&h, r](double x) { return boundary_value(h, x) - r; };
  const auto push = [&](double x) { sample.atoms.push_back({x, 1.0 / derivative(h, x)}); };
  const auto tol = detail::root_tolerance(r);

  const std::vector<double> breaks = support_partition(h.mu());
  if (breaks.empty()) {
    // alpha > 0 here, h is affine
    push((r - h.beta()) / h.alpha());
    return sample;
  }

  const RealLimits limits = real_limits(h);

  // (-inf, breaks.front()): h rises from its limit to +inf.
  if (r > limits.at_minus_infinity) {
    const double right = breaks.front();
    double step = 1.0;
    double left = right - step;
    while (std::isfinite(left) && f(left) >= 0.0) {
      step *= 2.0;
      left = right - step;
    }
    if (std::isfinite(left)) push(detail::bisect_increasing(f, left, right, tol));
  }

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (h.mu().in_slab_interior(lo + 0.5 * (hi - lo))) continue;
    push(detail::bisect_increasing(f, lo, hi, tol));
  }

  // (breaks.back(), +inf): h rises from -inf to its limit.
  if (r < limits.at_plus_infinity) {
    const double left = breaks.back();
    double step = 1.0;
    double right = left + step;
    while (std::isfinite(right) && f(right) <= 0.0) {
      step *= 2.0;
      right = left + step;
    }
    if (std::isfinite(right)) push(detail::bisect_increasing(f, left, right, tol));
  }
  return sample;
}

/// Herglotz function h = -1/F for F(z) = sum_j w_j/(d_j - z), the quadratic
/// form of the resolvent of diag(d) against v with v_j^2 = w_j. The measure
/// nu = sum_j w_j delta_{d_j} must be purely atomic.
inline HerglotzTriple nu_to_h(const RealMeasure& nu) {
  if (!nu.is_atomic()) throw std::invalid_argument("nu_to_h: nu must be purely atomic");
  if (nu.atoms().empty()) throw std::invalid_argument("nu_to_h: nu must have at least one atom");
  const auto& atoms = nu.atoms();

  const auto F = [&atoms](double x) {
    double sum = 0.0;
    for (const Atom& at : atoms) sum += at.mass / (at.position - x);
    return sum;
  };
  const auto F_prime = [&atoms](double x) {
    double sum = 0.0;
    for (const Atom& at : atoms) {
      const double d = at.position - x;
      sum += at.mass / (d * d);
    }
    return sum;
  };

  std::vector<Atom> poles;
  poles.reserve(atoms.size() - 1);
  for (std::size_t j = 0; j + 1 < atoms.size(); ++j) {
    const double zero = detail::bisect_increasing(F, atoms[j].position, atoms[j + 1].position);
    poles.push_back({zero, 1.0 / F_prime(zero)});
  }

  Complex F_at_i = 0.0;
  for (const Atom& at : atoms) F_at_i += at.mass / (at.position - Complex(0.0, 1.0));
  // The regularized kernel is purely imaginary at z = i, so beta = Re h(i).
  const double beta = (-1.0 / F_at_i).real();
  return HerglotzTriple(1.0 / total_mass(nu), beta, make_measure(std::move(poles), {}));
}

/// Measure of g_0 = -1/h for a rational h with alpha > 0 and atomic mu.
inline RealMeasure h_to_nu(const HerglotzTriple& h) {
  if (!(h.alpha() > 0.0))
    throw std::invalid_argument("h_to_nu: requires alpha > 0 (finite-dimensional model)");
  if (!h.mu().is_atomic())
    throw std::invalid_argument("h_to_nu: requires a purely atomic mu (finite-dimensional model)");
  return make_measure(solve_h_equals_r(h, 0.0).atoms, {});
}

}  // namespace herglotz
