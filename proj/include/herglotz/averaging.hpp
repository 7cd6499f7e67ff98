#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "herglotz/measure.hpp"
#include "herglotz/rankone.hpp"
#include "herglotz/triple.hpp"

namespace herglotz {

enum class Backend { root, secular };

inline const char* to_string(Backend b) { return b == Backend::root ? "root" : "secular"; }

struct SweepConfig {
  /// Number of coupling samples; r_k = (2k - 1) / (2 n_r), k = 1..n_r.
  std::size_t n_r = 10000;
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  std::size_t n_bins = 400;
  Backend backend = Backend::root;
  /// Worker count; 0 means default_worker_count().
  unsigned threads = 0;

  void validate() const {
    if (n_r < 1) throw std::invalid_argument("sweep: n_r must be >= 1");
    if (n_bins < 1) throw std::invalid_argument("sweep: n_bins must be >= 1");
    if (!std::isfinite(lambda_lo) || !std::isfinite(lambda_hi) || !(lambda_lo < lambda_hi))
      throw std::invalid_argument("sweep: window requires finite lambda_lo < lambda_hi");
  }

  double bin_width() const { return (lambda_hi - lambda_lo) / static_cast<double>(n_bins); }

  double r_sample(std::size_t k) const {
    return static_cast<double>(2 * k + 1) / static_cast<double>(2 * n_r);
  }
};

/// Binned density of the averaged singular measure over [lambda_min,
/// lambda_min + bin_width * values.size()). Bins are half-open.
struct DensityGrid {
  double lambda_min = 0.0;
  double bin_width = 1.0;
  std::vector<double> values;
  /// Averaged mass of every atom swept, including those outside the window.
  double swept_mass = 0.0;

  double left(std::size_t i) const { return lambda_min + bin_width * static_cast<double>(i); }
  double center(std::size_t i) const {
    return lambda_min + bin_width * (static_cast<double>(i) + 0.5);
  }
  double lambda_max() const { return left(values.size()); }

  double integral() const {
    double sum = 0.0;
    for (double v : values) sum += v * bin_width;
    return sum;
  }
};

/// HERGLOTZ_THREADS if set to a positive integer, otherwise all cores.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("HERGLOTZ_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// r-samples per partial histogram. Fixed so that the summation order, and
/// with it every bit of the result, does not depend on the worker count.
inline constexpr std::size_t kSweepBlock = 256;

/// Histogram of (1/n_r) sum_k mu_{r_k}^(s): every atom (l, m) drawn from
/// sampler(r_k) adds m / (n_r * bin_width) to the bin containing l.
template <class Sampler>
DensityGrid sweep_with(Sampler&& sampler, const SweepConfig& cfg) {
  cfg.validate();
  const double bw = cfg.bin_width();
  const double scale = 1.0 / (static_cast<double>(cfg.n_r) * bw);
  const std::size_t n_blocks = (cfg.n_r + kSweepBlock - 1) / kSweepBlock;

  struct Partial {
    std::vector<double> values;
    double mass = 0.0;
  };
  std::vector<Partial> partials(n_blocks);

  const auto run_block = [&](std::size_t b) {
    Partial& p = partials[b];
    p.values.assign(cfg.n_bins, 0.0);
    const std::size_t k_end = std::min(cfg.n_r, (b + 1) * kSweepBlock);
    for (std::size_t k = b * kSweepBlock; k < k_end; ++k) {
      const SpectralSample sample = sampler(cfg.r_sample(k));
      for (const Atom& at : sample.atoms) {
        p.mass += at.mass;
        if (!(at.position >= cfg.lambda_lo && at.position < cfg.lambda_hi)) continue;
        const auto bin = static_cast<std::size_t>(std::floor((at.position - cfg.lambda_lo) / bw));
        p.values[std::min(bin, cfg.n_bins - 1)] += at.mass * scale;
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads ? cfg.threads : default_worker_count(), n_blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  DensityGrid grid{cfg.lambda_lo, bw, std::vector<double>(cfg.n_bins, 0.0), 0.0};
  for (const Partial& p : partials) {
    for (std::size_t i = 0; i < cfg.n_bins; ++i) grid.values[i] += p.values[i];
    grid.swept_mass += p.mass;
  }
  grid.swept_mass /= static_cast<double>(cfg.n_r);
  return grid;
}

inline DensityGrid sweep(const RankOneModel& m, const SweepConfig& cfg) {
  if (cfg.backend == Backend::secular)
    return sweep_with([&m](double r) { return secular_eigen(m, r); }, cfg);
  const HerglotzTriple h = nu_to_h(m.nu());
  return sweep_with([&h](double r) { return solve_h_equals_r(h, r); }, cfg);
}

inline DensityGrid sweep(const HerglotzTriple& h, const SweepConfig& cfg) {
  if (cfg.backend == Backend::root)
    return sweep_with([&h](double r) { return solve_h_equals_r(h, r); }, cfg);
  if (!(h.alpha() > 0.0) || !h.mu().is_atomic())
    throw std::invalid_argument(
        "sweep: the secular backend needs alpha > 0 and an atomic mu (no slabs)");
  return sweep(build_model(h_to_nu(h)), cfg);
}

/// Density of the averaged measure at lambda off the closed support of mu:
/// 1 if 0 < h(lambda) < 1, else 0. Follows from r = h(l), dr = h'(l) dl
/// applied to the atoms (l(r), 1/h'(l(r))) of mu_r.
inline int oracle_density(const HerglotzTriple& h, double lambda) {
  if (h.mu().in_support(lambda))
    throw std::domain_error("oracle_density: lambda = " + std::to_string(lambda) +
                            " lies in the closed support of mu");
  const double value = boundary_value(h, lambda);
  return value > 0.0 && value < 1.0 ? 1 : 0;
}

/// Points where the oracle density may change: solutions of h = 0 and
/// h = 1 plus the support breakpoints of mu.
inline std::vector<double> jump_points(const HerglotzTriple& h) {
  std::vector<double> points = support_partition(h.mu());
  for (double level : {0.0, 1.0})
    for (const Atom& at : solve_h_equals_r(h, level).atoms) points.push_back(at.position);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

/// The oracle density as a step function: constant between consecutive jump
/// points. Slab interiors carry no singular mass and count as 0.
class OracleProfile {
 public:
  explicit OracleProfile(const HerglotzTriple& h) : jumps_(jump_points(h)) {
    const auto value_at = [&h](double x) {
      return h.mu().in_support(x) ? 0 : oracle_density(h, x);
    };
    if (jumps_.empty()) {
      levels_.push_back(value_at(0.0));
      return;
    }
    levels_.push_back(value_at(jumps_.front() - 1.0));
    for (std::size_t i = 0; i + 1 < jumps_.size(); ++i)
      levels_.push_back(value_at(jumps_[i] + 0.5 * (jumps_[i + 1] - jumps_[i])));
    levels_.push_back(value_at(jumps_.back() + 1.0));
  }

  const std::vector<double>& jumps() const { return jumps_; }

  /// Lebesgue measure of {x in [lo, hi) : density(x) = 1}.
  double mass(double lo, double hi) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t piece = 0; piece < levels_.size(); ++piece) {
      if (levels_[piece] == 0) continue;
      const double a = piece == 0 ? -inf : jumps_[piece - 1];
      const double b = piece == jumps_.size() ? inf : jumps_[piece];
      const double overlap = std::min(b, hi) - std::max(a, lo);
      if (overlap > 0.0) sum += overlap;
    }
    return sum;
  }

  double distance_to_jump(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (double j : jumps_) best = std::min(best, std::abs(x - j));
    return best;
  }

 private:
  std::vector<double> jumps_;
  std::vector<int> levels_;
};

struct CompareReport {
  double l1_error = 0.0;
  double sup_error_off_jumps = 0.0;
  double mass_check = 0.0;
};

/// Exact bin averages of the oracle density on the grid's bins.
inline std::vector<double> oracle_bin_averages(const DensityGrid& grid, const OracleProfile& oracle) {
  std::vector<double> out(grid.values.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = oracle.mass(grid.left(i), grid.left(i + 1)) / grid.bin_width;
  return out;
}

/// Grid error against the oracle. Each bin is compared with the exact
/// average of the oracle over that bin, which equals the pointwise value
/// away from jumps. Bins centered on the support of mu are skipped, and the
/// sup norm ignores bins within 2 bin widths of a jump.
inline CompareReport compare(const DensityGrid& grid, const HerglotzTriple& h) {
  const OracleProfile oracle(h);
  const std::vector<double> expected = oracle_bin_averages(grid, oracle);
  CompareReport report;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double c = grid.center(i);
    if (h.mu().in_support(c)) continue;
    const double err = std::abs(grid.values[i] - expected[i]);
    report.l1_error += err * grid.bin_width;
    if (oracle.distance_to_jump(c) > 2.0 * grid.bin_width)
      report.sup_error_off_jumps = std::max(report.sup_error_off_jumps, err);
  }
  report.mass_check = std::abs(grid.integral() - oracle.mass(grid.lambda_min, grid.lambda_max()));
  return report;
}

struct Tolerances {
  double sup = 0.05;
  double l1 = 0.02;
  double mass = 0.01;
};

struct Verdict {
  bool passed = false;
  CompareReport report;
  Tolerances tolerances;
  SweepConfig config;
  /// Largest per-bin difference between the root and secular backends, when
  /// both apply to the model.
  std::optional<double> backend_max_diff;
};

/// Window [first jump - 1, last jump + 1].
inline std::pair<double, double> default_window(const HerglotzTriple& h) {
  const std::vector<double> jumps = jump_points(h);
  return {jumps.front() - 1.0, jumps.back() + 1.0};
}

namespace detail {

inline double max_abs_diff(const DensityGrid& a, const DensityGrid& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
  return diff;
}

inline Verdict judge(const DensityGrid& grid, const HerglotzTriple& h, const SweepConfig& cfg,
                     const Tolerances& tol) {
  Verdict v;
  v.report = compare(grid, h);
  v.tolerances = tol;
  v.config = cfg;
  v.passed = v.report.sup_error_off_jumps <= tol.sup && v.report.l1_error <= tol.l1 &&
             v.report.mass_check <= tol.mass;
  return v;
}

inline SweepConfig with_backend(SweepConfig cfg, Backend b) {
  cfg.backend = b;
  return cfg;
}

}  // namespace detail

/// Sweeps the averaged singular measure, compares it with the oracle density
/// and cross-checks the two backends when the model admits both.
inline Verdict theorem_check(const HerglotzTriple& h, const SweepConfig& cfg,
                             const Tolerances& tol = {}) {
  const bool finite_model = h.alpha() > 0.0 && h.mu().is_atomic();
  if (cfg.backend == Backend::secular && !finite_model)
    throw std::invalid_argument("theorem_check: the secular backend needs alpha > 0 and atomic mu");
  const DensityGrid grid = sweep(h, cfg);
  Verdict v = detail::judge(grid, h, cfg, tol);
  if (finite_model) {
    const Backend other = cfg.backend == Backend::root ? Backend::secular : Backend::root;
    v.backend_max_diff = detail::max_abs_diff(grid, sweep(h, detail::with_backend(cfg, other)));
  }
  return v;
}

inline Verdict theorem_check(const RankOneModel& m, const SweepConfig& cfg,
                             const Tolerances& tol = {}) {
  const HerglotzTriple h = nu_to_h(m.nu());
  const DensityGrid grid = sweep(m, cfg);
  Verdict v = detail::judge(grid, h, cfg, tol);
  const Backend other = cfg.backend == Backend::root ? Backend::secular : Backend::root;
  v.backend_max_diff = detail::max_abs_diff(grid, sweep(m, detail::with_backend(cfg, other)));
  return v;
}

}  // namespace herglotz
