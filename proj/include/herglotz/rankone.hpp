#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "herglotz/bisection.hpp"
#include "herglotz/measure.hpp"
#include "herglotz/triple.hpp"

namespace herglotz {

/// H_r = diag(d) + r v v^T with simple spectrum d and a cyclic vector v.
class RankOneModel {
 public:
  const std::vector<double>& d() const { return d_; }
  const std::vector<double>& v() const { return v_; }
  /// v_j^2, the masses of nu.
  const std::vector<double>& weights() const { return w_; }
  std::size_t size() const { return d_.size(); }
  /// Tr V = |v|^2.
  double trace_v() const { return trace_; }

  /// The measure nu = sum_j v_j^2 delta_{d_j}.
  RealMeasure nu() const {
    std::vector<Atom> atoms;
    atoms.reserve(size());
    for (std::size_t j = 0; j < size(); ++j) atoms.push_back({d_[j], w_[j]});
    return make_measure(std::move(atoms), {});
  }

 private:
  friend RankOneModel build_model(const RealMeasure& nu);

  std::vector<double> d_;
  std::vector<double> v_;
  std::vector<double> w_;
  double trace_ = 0.0;
};

inline RankOneModel build_model(const RealMeasure& nu) {
  if (!nu.is_atomic()) throw std::invalid_argument("build_model: nu must be purely atomic");
  if (nu.atoms().empty()) throw std::invalid_argument("build_model: nu must have at least one atom");
  RankOneModel m;
  for (const Atom& at : nu.atoms()) {
    m.d_.push_back(at.position);
    m.v_.push_back(std::sqrt(at.mass));
    m.w_.push_back(at.mass);
  }
  m.trace_ = total_mass(nu);
  return m;
}

/// Raised when 1 + r F(z) vanishes.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kEigenvalueRejectDistance = 1e-14;

/// Tr(R_z(H_r) V) = <(H_r - z)^-1 v, v>, by an LU solve of the dense
/// (n x n) system. Independent of the rank-one algebra on purpose.
inline Complex resolvent_form(const RankOneModel& m, double r, Complex z) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = m.v()[static_cast<std::size_t>(j)];

  Eigen::MatrixXd H = r * v * v.transpose();
  for (Eigen::Index j = 0; j < n; ++j) H(j, j) += m.d()[static_cast<std::size_t>(j)];

  if (std::abs(z.imag()) < kEigenvalueRejectDistance) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(z - es.eigenvalues()[j]) < kEigenvalueRejectDistance)
        throw std::domain_error("resolvent_form: z is an eigenvalue of H_r");
    }
  }

  Eigen::MatrixXcd A = H.cast<Complex>();
  A.diagonal().array() -= z;
  const Eigen::VectorXcd x = A.partialPivLu().solve(v.cast<Complex>());
  return v.cast<Complex>().dot(x);
}

/// F_r = F / (1 + r F), the resolvent form after a coupling shift by r.
inline Complex krein_transform(Complex Fz, double r) {
  const Complex denom = 1.0 + r * Fz;
  if (std::abs(denom) < 1e-300) throw PoleError("krein_transform: 1 + r F(z) = 0");
  return Fz / denom;
}

inline constexpr int kSecularMaxIterations = 200;

/// Eigenvalues of H_r (r >= 0) with masses Tr(E_{l}(H_r) V) = |<u, v>|^2.
///
/// For r > 0 the eigenvalues are the roots of 1 + r sum_j w_j/(d_j - x),
/// one in each gap (d_j, d_{j+1}) and one in (d_n, d_n + r Tr V]. The last
/// one is searched on (d_n, d_n + 2 r Tr V) so the bound is never an
/// endpoint. Each root is located as an offset t from the nearer pole so that roots hugging a
/// pole keep full relative precision. Masses use the residue 1/(r^2 F'(l)).
inline SpectralSample secular_eigen(const RankOneModel& m, double r) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("secular_eigen: requires finite r >= 0");
  const std::size_t n = m.size();
  const auto& d = m.d();
  const auto& w = m.weights();

  SpectralSample sample{r, {}};
  sample.atoms.reserve(n);
  if (r == 0.0) {
    for (std::size_t j = 0; j < n; ++j) sample.atoms.push_back({d[j], w[j]});
    return sample;
  }

  std::vector<double> delta(n);
  const detail::BisectionTolerance tol{0.0, 0.0, kSecularMaxIterations};

  for (std::size_t k = 0; k < n; ++k) {
    // Secular function in coordinates x = d[origin] + t.
    const auto secular_at = [&](std::size_t origin) {
      for (std::size_t i = 0; i < n; ++i) delta[i] = d[i] - d[origin];
      return [&, r](double t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += w[i] / (delta[i] - t);
        return 1.0 + r * sum;
      };
    };

    std::size_t origin = k;
    double t = 0.0;
    if (k + 1 < n) {
      const double half_gap = 0.5 * (d[k + 1] - d[k]);
      const double f_mid = secular_at(k)(half_gap);
      if (f_mid > 0.0) {
        t = detail::bisect_increasing(secular_at(k), 0.0, half_gap, tol);
      } else if (f_mid < 0.0) {
        origin = k + 1;
        t = detail::bisect_increasing(secular_at(k + 1), -half_gap, 0.0, tol);
      } else {
        t = half_gap;
      }
    } else {
      t = detail::bisect_increasing(secular_at(k), 0.0, 2.0 * r * m.trace_v(), tol);
    }

    for (std::size_t i = 0; i < n; ++i) delta[i] = d[i] - d[origin];
    double F_prime = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = delta[i] - t;
      F_prime += w[i] / (gap * gap);
    }

    double lambda = d[origin] + t;
    // Keep strict interlacing when the offset is below the resolution of d.
    if (lambda <= d[k]) lambda = std::nextafter(d[k], std::numeric_limits<double>::infinity());
    if (k + 1 < n && lambda >= d[k + 1]) lambda = std::nextafter(d[k + 1], d[k]);
    sample.atoms.push_back({lambda, 1.0 / (r * r * F_prime)});
  }
  return sample;
}

/// |1 + r sum_j w_j/(d_j - x)| at x, the secular-equation residual.
inline double secular_residual(const RankOneModel& m, double r, double x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.weights()[i] / (m.d()[i] - x);
  return std::abs(1.0 + r * sum);
}

/// Half-open interval [lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Tr(E_Delta(H_r) V) for Delta = [lo, hi).
inline double spectral_measure_on_set(const SpectralSample& s, const Interval& delta) {
  double sum = 0.0;
  for (const Atom& at : s.atoms)
    if (at.position >= delta.lo && at.position < delta.hi) sum += at.mass;
  return sum;
}

}  // namespace herglotz
