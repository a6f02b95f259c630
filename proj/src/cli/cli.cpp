#include "hilsim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "hilsim/coilopt.hpp"
#include "hilsim/csv.hpp"
#include "hilsim/field_kernels.hpp"

namespace hilsim::cli {

using config::Config;
using config::ConfigError;
namespace fs = std::filesystem;

namespace {

// runtime failures that are not the user's fault map to exit 2
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string preset;
  std::string outDir = "hilsim-out";
  std::uint64_t seed = 0;
  bool seedGiven = false;
  bool validateOnly = false;
  std::vector<std::string> sets;
  std::vector<std::string> methods;
};

void add_common(CLI::App* sub, Common& c, bool withMethods) {
  sub->add_option("--config", c.config, "scenario file (layered over --preset)");
  sub->add_option("--preset", c.preset, "shipped preset name");
  sub->add_option("--out-dir", c.outDir, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "override [run] seed")->each([&c](const std::string&) { c.seedGiven = true; });
  sub->add_flag("--validate-only", c.validateOnly, "parse and validate the configuration, then exit");
  sub->add_option("--set", c.sets, "override one key, section.key=value (repeatable)");
  if (withMethods) sub->add_option("--method", c.methods, "restrict to these methods (lms, svs, atlms, convex)");
}

Config layered(const Common& c, const std::string& preset) {
  Config cfg;
  if (!preset.empty()) cfg = config::load_preset(preset);
  if (!c.config.empty()) cfg.merge(Config::load(c.config));
  for (const auto& kv : c.sets) {
    const auto dot = kv.find('.');
    const auto eq = kv.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1), kv.substr(eq + 1));
  }
  if (c.seedGiven) cfg.set("run", "seed", std::to_string(c.seed));
  if (!c.methods.empty()) {
    std::string joined;
    for (const auto& m : c.methods) joined += (joined.empty() ? "" : ",") + m;
    cfg.set("run", "methods", joined);
  }
  return cfg;
}

// default preset only applies when neither --preset nor --config was given
std::string pick_preset(const Common& c, const std::string& fallback) {
  if (!c.preset.empty()) return c.preset;
  return c.config.empty() ? fallback : std::string();
}

void write_file(const fs::path& path, const std::string& body) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw RuntimeFailure("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeFailure("cannot write " + path.string());
  f << body;
  if (!f.flush()) throw RuntimeFailure("write failed: " + path.string());
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// ---------------------------------------------------------------- optimize

int cmd_optimize(const Common& c, double sideMm, bool sideGiven, std::ostream& out) {
  const Config cfg = layered(c, pick_preset(c, "table2"));
  const double side = sideGiven ? sideMm : cfg.get_double("optimize", "side_mm", cfg.get_double("coil", "side_mm", 840.4));
  if (!(side > 0.0) || !std::isfinite(side)) throw ConfigError("--side-mm must be a positive length");
  const double res = cfg.get_double("optimize", "resolution_mm", 1.0);
  if (!(res > 0.0)) throw ConfigError("[optimize] resolution_mm must be > 0");
  const auto thresholds = cfg.get_doubles("optimize", "thresholds_pct", {0.1, 0.5, 1, 5, 10, 20});
  const double maxOverD = cfg.get_double("optimize", "profile_max_over_d", 0.8);
  const long points = cfg.get_long("optimize", "profile_points", 81);
  if (points < 2) throw ConfigError("[optimize] profile_points must be >= 2");
  auto pair = pair_from(cfg);
  if (c.validateOnly) {
    out << "configuration ok\n";
    return kOk;
  }

  const auto opt = coilopt::solve_optimal_ratio();
  pair.side = side * 1e-3;
  pair.spacing = coilopt::optimal_spacing(pair.side);
  out << std::setprecision(15);
  out << "optimal ratio n*        " << opt.n << "\n";
  out << "polynomial residual     " << opt.residual << "\n";
  out << "bisection iterations    " << opt.iterations << "\n";
  out << std::setprecision(6);
  out << "side                    " << side << " mm\n";
  out << "optimal spacing         " << pair.spacing * 1e3 << " mm\n";
  out << "d2Bz/dz2 at centre      " << coilopt::second_derivative_center(pair) << " T/m^2\n";
  out << "centre |Bz|             " << std::abs(magnetics::onaxis_field(pair, 0.0)) * 1e6 << " uT"
      << " (N=" << pair.turns << ", I=" << pair.current << " A)\n";
  for (double thr : thresholds) {
    const auto reg = coilopt::uniform_region(pair, thr, res * 1e-3);
    out << "uniform region " << std::setw(5) << thr << "%   +-x/d " << fmt(reg.extentXoverD, 4) << "   +-y/d "
        << fmt(reg.extentYoverD, 4) << "\n";
  }

  std::string csvBody = "pos_over_d,uniformity_pct\n";
  for (long i = 0; i < points; ++i) {
    const double u = maxOverD * static_cast<double>(i) / static_cast<double>(points - 1);
    csv::append(csvBody, u);
    csvBody.push_back(',');
    csv::append(csvBody, magnetics::uniformity(pair, {u * pair.spacing, 0.0, 0.0}, magnetics::UniformityMode::ZComponent));
    csvBody.push_back('\n');
  }
  write_file(fs::path(c.outDir) / "uniformity_profile.csv", csvBody);
  return kOk;
}

// --------------------------------------------------------------- field-map

int cmd_field_map(const Common& c, std::ostream& out) {
  const Config cfg = layered(c, pick_preset(c, "table2"));
  const auto pair = pair_from(cfg);
  const auto grid = grid_from(cfg);
  const auto mode = uniformity_mode_from(cfg);
  if (c.validateOnly) {
    out << "configuration ok\n";
    return kOk;
  }
  const auto rows = magnetics::field_map(pair, grid, mode);
  const fs::path path = fs::path(c.outDir) / "field_map.csv";
  write_file(path, magnetics::field_map_csv(rows));
  const auto centre = magnetics::pair_field(pair, {0, 0, 0});
  out << "centre |Bz|  " << fmt(std::abs(centre.bz) * 1e6) << " uT\n";
  out << "points       " << rows.size() << "\n";
  out << "kernel       " << kernels::isa_name(kernels::detect_isa()) << "\n";
  out << "wrote        " << path.string() << "\n";
  return kOk;
}

// ------------------------------------------------------------------- sysid

void print_sysid(const std::vector<std::pair<std::string, experiments::MetricsReport>>& rows, double snr,
                 std::ostream& out) {
  out << "SNR " << snr << " dB\n";
  out << std::left << std::setw(8) << "method" << std::right << std::setw(12) << "iterations" << std::setw(16)
      << "final MSE" << std::setw(14) << "reconverge" << "\n";
  for (const auto& [name, r] : rows)
    out << std::left << std::setw(8) << name << std::right << std::setw(12) << r.itersToConverge << std::setw(16)
        << fmt(r.finalMse) << std::setw(14) << r.reconvergeIters << "\n";
}

int cmd_sysid(const Common& c, double snr, bool snrGiven, std::ostream& out) {
  std::string preset = pick_preset(c, "table4");
  if (preset == "table4") {
    const double want = snrGiven ? snr : 30.0;
    if (want == 10.0) preset = "table4-10db";
    else if (want == 30.0) preset = "table4-30db";
    else throw ConfigError("preset table4 has parameter sets for 10 and 30 dB only; use --config for other SNRs");
  }
  Config cfg = layered(c, preset);
  if (snrGiven) cfg.set("sysid", "snr_db", fmt(snr, 17));
  const auto scn = sysid_from(cfg);
  const auto params = method_params_from(cfg);
  const auto methods = methods_from(cfg);
  if (c.validateOnly) {
    out << "configuration ok\n";
    return kOk;
  }
  std::vector<std::pair<std::string, experiments::MetricsReport>> rows;
  for (auto m : methods) rows.emplace_back(control::method_name(m), experiments::run_sysid(scn, m, params));
  write_file(fs::path(c.outDir) / "metrics.csv", experiments::metrics_csv(rows));
  write_file(fs::path(c.outDir) / "mse_curve.csv", experiments::mse_curve_csv(rows));
  print_sysid(rows, scn.snrDb, out);
  return kOk;
}

// -------------------------------------------------------------------- step

void print_step(const std::string& label, const std::vector<std::pair<std::string, experiments::MetricsReport>>& rows,
                std::ostream& out) {
  out << label << "\n";
  out << std::left << std::setw(8) << "method" << std::right << std::setw(10) << "reach s" << std::setw(14)
      << "mean nT" << std::setw(12) << "RMSE nT" << std::setw(26) << "fluctuation nT" << "\n";
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(8) << name << std::right << std::setw(10) << fmt(r.reachTargetTimeS, 4)
        << std::setw(14) << fmt(r.meanSteadyNT, 8) << std::setw(12) << fmt(r.rmseSteady, 5) << std::setw(26)
        << (fmt(r.fluctMinNT, 7) + " .. " + fmt(r.fluctMaxNT, 7));
    if (r.saturationWarning) out << "  (actuator saturated " << fmt(100 * r.saturatedFraction, 3) << "%)";
    out << "\n";
  }
}

void run_step_preset(const Common& c, const std::string& preset, const fs::path& dir, std::ostream& out) {
  const Config cfg = layered(c, preset);
  const auto scn = step_from(cfg);
  const auto params = method_params_from(cfg);
  const auto methods = methods_from(cfg);
  if (c.validateOnly) {
    out << (preset.empty() ? c.config : preset) << ": configuration ok\n";
    return;
  }
  std::vector<std::pair<std::string, experiments::MetricsReport>> rows;
  for (auto m : methods) {
    auto run = experiments::run_step_response(scn, m, params);
    write_file(dir / control::method_name(m) / "trace.csv", experiments::step_trace_csv(run.trace));
    rows.emplace_back(control::method_name(m), std::move(run.metrics));
  }
  write_file(dir / "metrics.csv", experiments::metrics_csv(rows));
  print_step(preset.empty() ? c.config : preset, rows, out);
}

int cmd_step(const Common& c, std::ostream& out) {
  const std::string preset = pick_preset(c, "table7");
  if (preset == "table7") {
    run_step_preset(c, "table7-up", fs::path(c.outDir) / "up", out);
    run_step_preset(c, "table7-down", fs::path(c.outDir) / "down", out);
  } else {
    run_step_preset(c, preset, fs::path(c.outDir), out);
  }
  return kOk;
}

// ------------------------------------------------------------------- check

int cmd_check(const Common& c, double betaScale, double cScale, bool strict, std::ostream& out) {
  const Config cfg = layered(c, pick_preset(c, "table4-0"));
  auto params = method_params_from(cfg).convex;
  const long samples = cfg.get_long("check", "samples", 100000);
  const long order = cfg.get_long("sysid", "order", 2);
  betaScale *= cfg.get_double("check", "beta_scale", 1.0);
  cScale *= cfg.get_double("check", "c_scale", 1.0);
  if (samples < 1 || order < 1) throw ConfigError("[check] samples and [sysid] order must be >= 1");
  if (!(betaScale > 0.0) || !(cScale > 0.0)) throw ConfigError("scale factors must be > 0");
  const std::uint64_t seed = cfg.get_u64("run", "seed", 1);
  if (c.validateOnly) {
    out << "configuration ok\n";
    return kOk;
  }
  params.beta *= betaScale;
  params.c *= cScale;

  // white unit-variance input through a tap-delay line, as in the identification runs
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> taps(static_cast<std::size_t>(order));
  for (auto& v : taps) v = gauss(rng);
  std::vector<std::vector<double>> xs;
  xs.reserve(static_cast<std::size_t>(samples));
  for (long n = 0; n < samples; ++n) {
    std::rotate(taps.rbegin(), taps.rbegin() + 1, taps.rend());
    taps[0] = gauss(rng);
    xs.push_back(taps);
  }
  const auto rep = control::check_convergence_condition(params, xs);
  out << std::setprecision(6);
  out << "lambda_max              " << rep.lambdaMax << " (" << rep.powerIterations << " power iterations)\n";
  out << "limit 2/lambda_max      " << rep.limit << "\n";
  out << "beta/(phi + min x'x)    " << rep.nlmsBound << "  " << (rep.nlmsOk ? "ok" : "VIOLATED") << "\n";
  out << "C                       " << params.c << "  " << (rep.cOk ? "ok" : "VIOLATED") << "\n";
  out << "beta > 0                " << (rep.betaPositive ? "ok" : "VIOLATED") << "\n";
  out << "result                  " << (rep.ok() ? "PASS" : "FAIL") << "\n";
  return (!rep.ok() && strict) ? kFailure : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Square Helmholtz coil testbed simulator"};
  app.name("hilsim");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "hilsim 1.0");

  Common common;
  double sideMm = 0.0, snr = 0.0, betaScale = 1.0, cScale = 1.0;
  bool strict = false;
  bool listPresets = false;

  auto* optimize = app.add_subcommand("optimize", "optimal spacing for a side length, uniform region extents");
  add_common(optimize, common, false);
  auto* sideOpt = optimize->add_option("--side-mm", sideMm, "coil side length in millimetres");

  auto* fieldMap = app.add_subcommand("field-map", "field and uniformity on a grid, written to field_map.csv");
  add_common(fieldMap, common, false);

  auto* sysid = app.add_subcommand("sysid", "identification runs for all methods: metrics.csv, mse_curve.csv");
  add_common(sysid, common, true);
  auto* snrOpt = sysid->add_option("--snr-db", snr, "signal-to-noise ratio in dB");

  auto* step = app.add_subcommand("step", "closed-loop step responses: metrics.csv and <method>/trace.csv");
  add_common(step, common, true);

  auto* check = app.add_subcommand("check", "step-size convergence condition for the convex controller");
  add_common(check, common, false);
  check->add_flag("--strict", strict, "exit 2 when the condition is violated");
  check->add_option("--beta-scale", betaScale, "multiply beta before checking");
  check->add_option("--c-scale", cScale, "multiply C before checking");

  auto* presets = app.add_subcommand("presets", "list shipped presets, or print one with --preset");
  presets->add_option("--preset", common.preset, "preset to print");
  presets->add_flag("--list", listPresets, "list names only");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*optimize) return cmd_optimize(common, sideMm, sideOpt->count() > 0, out);
    if (*fieldMap) return cmd_field_map(common, out);
    if (*sysid) return cmd_sysid(common, snr, snrOpt->count() > 0, out);
    if (*step) return cmd_step(common, out);
    if (*check) return cmd_check(common, betaScale, cScale, strict, out);
    if (*presets) {
      if (common.preset.empty() || listPresets) {
        for (const auto& n : config::preset_names()) out << n << "\n";
      } else {
        const auto text = config::preset_text(common.preset);
        if (!text) throw ConfigError("unknown preset '" + common.preset + "'");
        out << *text;
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "hilsim: " << e.what() << "\n";
    return kUsage;
  } catch (const magnetics::InvalidGeometry& e) {
    err << "hilsim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "hilsim: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace hilsim::cli
