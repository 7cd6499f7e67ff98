#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "herglotz.hpp"
#include "herglotz/config.hpp"
#include "herglotz/csv.hpp"

namespace herglotz::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError(std::string(what) + ": expected A:B, got '" + text + "'");
  try {
    return {parse_double(std::string_view(text).substr(0, colon)),
            parse_double(std::string_view(text).substr(colon + 1))};
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto [lo, hi] = parse_pair(text, "--range");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw UsageError("--range: requires finite LO < HI, got '" + text + "'");
  return {lo, hi};
}

ModelConfig load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open model file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path + "'");
  return out;
}

Backend parse_backend(const std::string& name) {
  if (name == "root") return Backend::root;
  if (name == "secular") return Backend::secular;
  throw UsageError("--backend: expected root or secular, got '" + name + "'");
}

DensityGrid sweep_model(const ModelConfig& model, const SweepConfig& cfg) {
  if (model.kind == ModelKind::nu_atomic) return sweep(model.rank_one(), cfg);
  return sweep(model.function(), cfg);
}

struct Options {
  std::string model;
  std::string out;
  std::string z = "0:1";
  std::string range;
  std::string backend = "root";
  std::size_t r_steps = 10000;
  std::size_t bins = 400;
  double lambda = 0.0;
  int eps_min_exp = 10;
  int eps_max_exp = 40;
  std::optional<double> r;
  Tolerances tol;
};

int cmd_eval(const Options& o, std::ostream& out) {
  const auto [re, im] = parse_pair(o.z, "--z");
  const Complex value = eval(load_model(o.model).function(), Complex(re, im));
  out << format_double(value.real()) << ',' << format_double(value.imag()) << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  const ModelConfig model = load_model(o.model);
  const auto [lo, hi] = parse_range(o.range);
  SweepConfig cfg{o.r_steps, lo, hi, o.bins, parse_backend(o.backend), 0};
  const DensityGrid grid = sweep_model(model, cfg);
  const OracleProfile oracle(model.function());
  const std::vector<double> expected = oracle_bin_averages(grid, oracle);

  std::ofstream file = open_output(o.out);
  CsvWriter csv(file, {"lambda", "density", "oracle", "abs_err"});
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    csv.row({grid.center(i), grid.values[i], expected[i], std::abs(grid.values[i] - expected[i])});
  return kExitOk;
}

int cmd_eigenflow(const Options& o) {
  const ModelConfig model = load_model(o.model);
  if (model.kind != ModelKind::nu_atomic) throw UsageError("eigenflow: requires a nu-atomic model");
  const RankOneModel m = model.rank_one();

  std::ofstream file = open_output(o.out);
  CsvWriter csv(file, {"r", "index", "lambda", "mass"});
  for (std::size_t k = 0; k <= o.r_steps; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(o.r_steps);
    const SpectralSample s = secular_eigen(m, r);
    for (std::size_t j = 0; j < s.atoms.size(); ++j)
      csv.row({r, static_cast<double>(j), s.atoms[j].position, s.atoms[j].mass});
  }
  return kExitOk;
}

int cmd_boundary(const Options& o) {
  if (o.eps_min_exp > o.eps_max_exp)
    throw UsageError("boundary: requires --eps-min-exp <= --eps-max-exp");
  const HerglotzTriple h = load_model(o.model).function();
  std::ofstream file = open_output(o.out);
  CsvWriter csv(file, {"eps", "re", "im"});
  for (int k = o.eps_min_exp; k <= o.eps_max_exp; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const Complex z(o.lambda, eps);
    const Complex value = o.r ? transform(h, *o.r)(z) : eval(h, z);
    csv.row({eps, value.real(), value.imag()});
  }
  return kExitOk;
}

int cmd_oracle(const Options& o) {
  const HerglotzTriple h = load_model(o.model).function();
  const auto [lo, hi] = parse_range(o.range);
  const double bw = (hi - lo) / static_cast<double>(o.bins);
  std::ofstream file = open_output(o.out);
  CsvWriter csv(file, {"lambda", "oracle"});
  for (std::size_t i = 0; i < o.bins; ++i) {
    const double c = lo + bw * (static_cast<double>(i) + 0.5);
    const double value = h.mu().in_support(c) ? std::nan("") : oracle_density(h, c);
    csv.row({c, value});
  }
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  const ModelConfig model = load_model(o.model);
  const HerglotzTriple h = model.function();
  const auto [lo, hi] = o.range.empty() ? default_window(h) : parse_range(o.range);
  const SweepConfig cfg{o.r_steps, lo, hi, o.bins, parse_backend(o.backend), 0};
  const Verdict v = model.kind == ModelKind::nu_atomic ? theorem_check(model.rank_one(), cfg, o.tol)
                                                       : theorem_check(h, cfg, o.tol);

  nlohmann::ordered_json record;
  record["verdict"] = v.passed ? "pass" : "fail";
  record["l1_error"] = v.report.l1_error;
  record["sup_error_off_jumps"] = v.report.sup_error_off_jumps;
  record["mass_check"] = v.report.mass_check;
  if (v.backend_max_diff) record["backend_max_diff"] = *v.backend_max_diff;
  record["tolerances"] = {{"sup", v.tolerances.sup}, {"l1", v.tolerances.l1}, {"mass", v.tolerances.mass}};
  record["r_steps"] = cfg.n_r;
  record["bins"] = cfg.n_bins;
  record["range"] = {cfg.lambda_lo, cfg.lambda_hi};
  record["backend"] = to_string(cfg.backend);
  out << record.dump(2) << '\n';
  return v.passed ? kExitOk : kExitVerdictFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Herglotz functions, rank-one models and averaged singular measures"};
  app.require_subcommand(1);
  Options o;

  const auto model_opt = [&o](CLI::App* sub) {
    sub->add_option("--model", o.model, "model JSON file")->required();
  };
  const auto window_opts = [&o](CLI::App* sub, bool range_required) {
    sub->add_option("--r-steps", o.r_steps, "number of midpoint samples of r in [0, 1]")
        ->check(CLI::PositiveNumber);
    sub->add_option("--bins", o.bins, "number of lambda bins")->check(CLI::PositiveNumber);
    auto* range = sub->add_option("--range", o.range, "lambda window LO:HI");
    if (range_required) range->required();
  };

  auto* eval_cmd = app.add_subcommand("eval", "print re,im of h(z)");
  model_opt(eval_cmd);
  eval_cmd->add_option("--z", o.z, "point RE:IM with IM > 0")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "binned density of the averaged singular measure");
  model_opt(sweep_cmd);
  window_opts(sweep_cmd, true);
  sweep_cmd->add_option("--backend", o.backend, "root or secular");
  sweep_cmd->add_option("--out", o.out, "CSV output")->required();

  auto* flow_cmd = app.add_subcommand("eigenflow", "eigenvalues and masses of H_r for r in [0, 1]");
  model_opt(flow_cmd);
  flow_cmd->add_option("--r-steps", o.r_steps, "r = k / N, k = 0..N")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--out", o.out, "CSV output")->required();

  auto* boundary_cmd = app.add_subcommand("boundary", "h(lambda + i 2^-k) for k in [K1, K2]");
  model_opt(boundary_cmd);
  boundary_cmd->add_option("--lambda", o.lambda, "real part")->required();
  boundary_cmd->add_option("--eps-min-exp", o.eps_min_exp, "first k (largest eps)");
  boundary_cmd->add_option("--eps-max-exp", o.eps_max_exp, "last k (smallest eps)");
  boundary_cmd->add_option("--r", o.r, "evaluate g_r = 1/(r - h) instead of h");
  boundary_cmd->add_option("--out", o.out, "CSV output")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "oracle density at bin centers");
  model_opt(oracle_cmd);
  oracle_cmd->add_option("--bins", o.bins, "number of lambda bins")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--range", o.range, "lambda window LO:HI")->required();
  oracle_cmd->add_option("--out", o.out, "CSV output")->required();

  auto* check_cmd = app.add_subcommand("check", "verify the averaged density is a 0/1 indicator");
  model_opt(check_cmd);
  window_opts(check_cmd, false);
  check_cmd->add_option("--backend", o.backend, "root or secular");
  check_cmd->add_option("--tol-sup", o.tol.sup, "sup error off jump neighborhoods");
  check_cmd->add_option("--tol-l1", o.tol.l1, "L1 error");
  check_cmd->add_option("--tol-mass", o.tol.mass, "integrated mass error");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval_cmd) return cmd_eval(o, out);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*flow_cmd) return cmd_eigenflow(o);
    if (*boundary_cmd) return cmd_boundary(o);
    if (*oracle_cmd) return cmd_oracle(o);
    if (*check_cmd) return cmd_check(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace herglotz::cli
