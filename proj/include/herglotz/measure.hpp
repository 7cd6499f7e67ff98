#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace herglotz {

struct Atom {
  double position = 0.0;
  double mass = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Constant-density piece of an absolutely continuous measure on [a, b].
struct Slab {
  double a = 0.0;
  double b = 0.0;
  double height = 0.0;

  double mass() const { return height * (b - a); }
  bool contains_open(double x) const { return a < x && x < b; }
  bool contains_closed(double x) const { return a <= x && x <= b; }

  friend bool operator==(const Slab&, const Slab&) = default;
};

/// Positions closer than this are treated as the same atom.
inline constexpr double kAtomMergeTolerance = 1e-12;

/// A finite positive measure on the real line: point masses plus disjoint
/// constant-density slabs. The Lebesgue decomposition is explicit, the
/// atoms are the singular part and the slabs the absolutely continuous one.
///
/// Instances are only produced by make_measure and are immutable afterwards.
class RealMeasure {
 public:
  RealMeasure() = default;

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Slab>& slabs() const { return slabs_; }

  bool empty() const { return atoms_.empty() && slabs_.empty(); }
  bool is_atomic() const { return slabs_.empty(); }

  /// True if x lies in the closed support (an atom position or a closed slab).
  bool in_support(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& at, double v) { return at.position < v; });
    if (it != atoms_.end() && it->position == x) return true;
    return std::any_of(slabs_.begin(), slabs_.end(),
                       [x](const Slab& s) { return s.contains_closed(x); });
  }

  /// True if x lies strictly inside one of the slabs.
  bool in_slab_interior(double x) const {
    return std::any_of(slabs_.begin(), slabs_.end(),
                       [x](const Slab& s) { return s.contains_open(x); });
  }

  friend bool operator==(const RealMeasure&, const RealMeasure&) = default;

 private:
  friend RealMeasure make_measure(std::vector<Atom> atoms, std::vector<Slab> slabs);

  std::vector<Atom> atoms_;
  std::vector<Slab> slabs_;
};

/// Normalizes raw atoms and slabs into a RealMeasure.
///
/// Atoms within kAtomMergeTolerance are merged by summing masses, zero-mass
/// atoms and zero-height or empty slabs are dropped, and both lists come out
/// sorted. An atom may sit inside a slab. Throws std::invalid_argument on
/// non-finite input, negative mass or height, a reversed slab, or overlapping
/// slabs.
inline RealMeasure make_measure(std::vector<Atom> atoms, std::vector<Slab> slabs) {
  for (const Atom& at : atoms) {
    if (!std::isfinite(at.position) || !std::isfinite(at.mass))
      throw std::invalid_argument("measure: atom has a non-finite field");
    if (at.mass < 0.0)
      throw std::invalid_argument("measure: atom mass must be >= 0");
  }
  for (const Slab& s : slabs) {
    if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.height))
      throw std::invalid_argument("measure: slab has a non-finite field");
    if (s.height < 0.0)
      throw std::invalid_argument("measure: slab height must be >= 0");
    if (s.b < s.a)
      throw std::invalid_argument("measure: slab must satisfy a <= b");
  }

  std::erase_if(atoms, [](const Atom& at) { return at.mass == 0.0; });
  std::erase_if(slabs, [](const Slab& s) { return s.height == 0.0 || s.a == s.b; });

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.position < r.position; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& at : atoms) {
    if (!merged.empty() && at.position - merged.back().position <= kAtomMergeTolerance)
      merged.back().mass += at.mass;
    else
      merged.push_back(at);
  }

  std::sort(slabs.begin(), slabs.end(), [](const Slab& l, const Slab& r) { return l.a < r.a; });
  for (std::size_t i = 1; i < slabs.size(); ++i) {
    if (slabs[i].a < slabs[i - 1].b)
      throw std::invalid_argument("measure: slabs [" + std::to_string(slabs[i - 1].a) + ", " +
                                  std::to_string(slabs[i - 1].b) + "] and [" +
                                  std::to_string(slabs[i].a) + ", " + std::to_string(slabs[i].b) +
                                  "] overlap");
  }

  RealMeasure m;
  m.atoms_ = std::move(merged);
  m.slabs_ = std::move(slabs);
  return m;
}

inline double total_mass(const RealMeasure& m) {
  double sum = 0.0;
  for (const Atom& at : m.atoms()) sum += at.mass;
  for (const Slab& s : m.slabs()) sum += s.mass();
  return sum;
}

/// Sorted, duplicate-free atom positions and slab endpoints. Between two
/// consecutive breakpoints the associated Herglotz function is either
/// real-analytic (outside the slabs) or has positive imaginary boundary
/// values (inside a slab).
inline std::vector<double> support_partition(const RealMeasure& m) {
  std::vector<double> points;
  points.reserve(m.atoms().size() + 2 * m.slabs().size());
  for (const Atom& at : m.atoms()) points.push_back(at.position);
  for (const Slab& s : m.slabs()) {
    points.push_back(s.a);
    points.push_back(s.b);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace herglotz
