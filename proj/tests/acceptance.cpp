// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "herglotz.hpp"
#include "test_support.hpp"

namespace {

using namespace herglotz;
namespace fs = std::filesystem;

struct Outcome {
  bool passed;
  std::string detail;
};

// Criterion 1 parameters.
constexpr int kTheoremModels = 50;
constexpr std::size_t kSweepSamples = 10000;
constexpr std::size_t kSweepBins = 400;
constexpr double kTolSup = 0.05;
constexpr double kTolL1 = 0.02;
constexpr double kTolMassRelative = 0.01;
constexpr double kSecondsPerModel = 60.0;

std::vector<RealMeasure> theorem_models() {
  std::mt19937_64 rng(20260101);
  std::vector<RealMeasure> models;
  for (int i = 0; i < kTheoremModels; ++i) models.push_back(testing::random_nu(rng));
  return models;
}

SweepConfig window_config(std::size_t n_r, double lo, double hi, std::size_t bins, Backend b) {
  SweepConfig cfg;
  cfg.n_r = n_r;
  cfg.lambda_lo = lo;
  cfg.lambda_hi = hi;
  cfg.n_bins = bins;
  cfg.backend = b;
  return cfg;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome theorem_verification() {
  double worst_sup = 0.0, worst_l1 = 0.0, worst_l1_per_mass = 0.0, worst_mass = 0.0, slowest = 0.0;
  int failures = 0, l1_failures = 0;
  for (const RealMeasure& nu : theorem_models()) {
    const auto start = std::chrono::steady_clock::now();
    const RankOneModel m = build_model(nu);
    const double lo = m.d().front() - 1.0;
    const double hi = m.d().back() + m.trace_v() + 1.0;
    const SweepConfig cfg = window_config(kSweepSamples, lo, hi, kSweepBins, Backend::secular);
    const Verdict v = theorem_check(m, cfg, {kTolSup, kTolL1, kTolMassRelative * m.trace_v()});
    const double integral = sweep(m, cfg).integral();
    const double mass_rel = std::abs(integral - m.trace_v()) / m.trace_v();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    worst_sup = std::max(worst_sup, v.report.sup_error_off_jumps);
    worst_l1 = std::max(worst_l1, v.report.l1_error);
    worst_l1_per_mass = std::max(worst_l1_per_mass, v.report.l1_error / m.trace_v());
    worst_mass = std::max(worst_mass, mass_rel);
    slowest = std::max(slowest, seconds);
    if (v.report.l1_error > kTolL1) ++l1_failures;
    if (!v.passed || mass_rel > kTolMassRelative || seconds > kSecondsPerModel) ++failures;
  }
  return {failures == 0,
          std::to_string(kTheoremModels) + " models, " + std::to_string(failures) + " failing (" +
              std::to_string(l1_failures) + " on L1), worst sup " + fmt(worst_sup) + ", worst L1 " +
              fmt(worst_l1) + " (L1/TrV " + fmt(worst_l1_per_mass) + "), worst rel mass " +
              fmt(worst_mass) + ", slowest " + fmt(slowest) + " s"};
}

Outcome identity_function_density() {
  const HerglotzTriple h = testing::identity_function();
  const DensityGrid grid = sweep(h, window_config(10000, -0.5, 1.5, 100, Backend::root));
  const double l1 = compare(grid, h).l1_error;
  return {l1 < 1e-3, "L1 " + fmt(l1) + " < 1e-3"};
}

Outcome z_minus_inverse_density() {
  const HerglotzTriple h = testing::z_minus_inverse();
  const std::vector<double> expected = {-1.0, testing::kGoldenConjugate, 0.0, 1.0, testing::kGolden};
  const std::vector<double> jumps = jump_points(h);
  double jump_err = jumps.size() == expected.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(jumps.size(), expected.size()); ++i)
    jump_err = std::max(jump_err, std::abs(jumps[i] - expected[i]));

  const auto [lo, hi] = default_window(h);
  const DensityGrid grid = sweep(h, window_config(10000, lo, hi, 400, Backend::root));
  const CompareReport report = compare(grid, h);
  const double mass_err = std::abs(grid.integral() - 1.0);
  return {jump_err <= 1e-9 && report.sup_error_off_jumps <= 0.05 && mass_err <= 1e-2,
          "jump err " + fmt(jump_err) + ", sup " + fmt(report.sup_error_off_jumps) + ", mass err " +
              fmt(mass_err)};
}

Outcome identity_suite() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> coupling(0.0, 1.0);
  double krein = 0.0, transform_err = 0.0;
  for (int model = 0; model < 20; ++model) {
    const RealMeasure nu = testing::random_nu(rng, std::uniform_int_distribution<std::size_t>(1, 20)(rng));
    const RankOneModel m = build_model(nu);
    const HerglotzTriple h = nu_to_h(nu);
    for (int k = 0; k < 10; ++k) {
      const double r = coupling(rng);
      for (Complex z : testing::upper_half_plane_grid()) {
        const Complex direct = resolvent_form(m, r, z);
        krein = std::max(krein, std::abs(direct - krein_transform(resolvent_form(m, 0.0, z), r)));
        transform_err = std::max(transform_err, std::abs(direct - transform(h, r)(z)));
      }
    }
  }
  return {krein < 1e-10 && transform_err < 1e-10,
          "Krein " + fmt(krein) + ", (r-h)^-1 vs Tr(R V) " + fmt(transform_err)};
}

Outcome backend_equivalence() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> coupling(0.0, 1.0);
  double pos_err = 0.0, mass_err = 0.0;
  bool counts_match = true;
  for (int model = 0; model < 20; ++model) {
    const RealMeasure nu = testing::random_nu(rng);
    const RankOneModel m = build_model(nu);
    const HerglotzTriple h = nu_to_h(nu);
    for (int k = 0; k < 50; ++k) {
      const double r = coupling(rng);
      const SpectralSample a = secular_eigen(m, r);
      const SpectralSample b = solve_h_equals_r(h, r);
      if (a.atoms.size() != b.atoms.size()) {
        counts_match = false;
        continue;
      }
      for (std::size_t j = 0; j < a.atoms.size(); ++j) {
        pos_err = std::max(pos_err, std::abs(a.atoms[j].position - b.atoms[j].position));
        mass_err = std::max(mass_err, std::abs(a.atoms[j].mass - b.atoms[j].mass));
      }
    }
  }
  return {counts_match && pos_err <= 1e-9 && mass_err <= 1e-8,
          "positions " + fmt(pos_err) + ", masses " + fmt(mass_err)};
}

Outcome recovery_round_trip() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HerglotzTriple h = testing::random_atomic_triple(rng, true);
    worst = std::max(worst, std::abs(recover_alpha(h) - h.alpha()));
    worst = std::max(worst, std::abs(recover_beta(h) - h.beta()));
    for (const Atom& at : h.mu().atoms())
      worst = std::max(worst, std::abs(atom_mass_estimate(h, at.position) - at.mass));
  }
  return {worst <= 1e-6, "worst error " + fmt(worst)};
}

Outcome monotone_interlacing() {
  long violations = 0, checks = 0;
  for (const RealMeasure& nu : theorem_models()) {
    const RankOneModel m = build_model(nu);
    std::vector<double> previous = m.d();
    for (int k = 1; k <= 200; ++k) {
      const double r = k / 200.0;
      const SpectralSample s = secular_eigen(m, r);
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double l = s.atoms[j].position;
        ++checks;
        if (!(l >= previous[j]) || !(l > m.d()[j]) || (j + 1 < m.size() && !(l < m.d()[j + 1])))
          ++violations;
        previous[j] = l;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) +
                               " checks"};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "herglotz_acceptance";
  fs::create_directories(dir);
  const fs::path model = dir / "model.json";
  std::ofstream(model, std::ios::binary)
      << R"({"kind":"nu-atomic","atoms":[{"pos":-2,"mass":0.7},{"pos":-0.3,"mass":1.2},)"
      << R"({"pos":0.4,"mass":0.2},{"pos":3,"mass":1.9}]})";

  const auto run = [&](int threads) {
    const fs::path out = dir / ("density_" + std::to_string(threads) + ".csv");
    const std::string cmd = "HERGLOTZ_THREADS=" + std::to_string(threads) + " \"" HERGLOTZ_CLI_PATH
                            "\" sweep --model \"" + model.string() +
                            "\" --r-steps 10000 --bins 400 --range -3:8 --out \"" + out.string() + "\"";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return std::make_pair(status, text.str());
  };
  const auto [status1, one] = run(1);
  const auto [status4, four] = run(4);
  fs::remove_all(dir);
  const bool ok = status1 == 0 && status4 == 0 && !one.empty() && one == four;
  return {ok, std::to_string(one.size()) + " bytes, identical: " + (one == four ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 averaged density is a 0/1 indicator (50 random models)", theorem_verification},
      {"AC2 h = z gives 1_[0,1]", identity_function_density},
      {"AC3 h = z - 1/z jump points and two-band density", z_minus_inverse_density},
      {"AC4 Krein and transform identities", identity_suite},
      {"AC5 root-finding vs secular backends", backend_equivalence},
      {"AC6 recovery round trip", recovery_round_trip},
      {"AC7 monotone flow and interlacing", monotone_interlacing},
      {"AC8 sweep output independent of HERGLOTZ_THREADS", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.passed ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    failed += o.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
