// One line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "hilsim/cli.hpp"
#include "hilsim/coilopt.hpp"
#include "hilsim/config.hpp"
#include "hilsim/control.hpp"
#include "hilsim/experiments.hpp"
#include "hilsim/magnetics.hpp"
#include "oracle.hpp"

using namespace hilsim;
using control::Method;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limitS, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool inTime = s < limitS;
  const bool pass = o.pass && inTime;
  if (!pass) ++failures;
  std::printf("%s  %2d  %-28s %s  [%.3g s, limit %g s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s,
              limitS, inTime ? "" : ", TOO SLOW");
  std::fflush(stdout);
}

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

const magnetics::HelmholtzPair& table2() {
  static const auto p = cli::pair_from(config::load_preset("table2"));
  return p;
}

using Rows = std::map<std::string, experiments::MetricsReport>;

Rows sysid_rows(const std::string& preset) {
  const auto cfg = config::load_preset(preset);
  const auto scn = cli::sysid_from(cfg);
  const auto params = cli::method_params_from(cfg);
  Rows rows;
  for (auto m : {Method::Lms, Method::Svs, Method::Atlms, Method::Convex})
    rows[control::method_name(m)] = experiments::run_sysid(scn, m, params);
  return rows;
}

Rows step_rows(const std::string& preset) {
  const auto cfg = config::load_preset(preset);
  const auto scn = cli::step_from(cfg);
  const auto params = cli::method_params_from(cfg);
  Rows rows;
  for (auto m : {Method::Lms, Method::Svs, Method::Atlms, Method::Convex})
    rows[control::method_name(m)] = experiments::run_step_response(scn, m, params).metrics;
  return rows;
}

std::string slurp_tree(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    all += fs::relative(f, root).string() + "\n" + ss.str();
  }
  return all;
}

}  // namespace

int main() {
  criterion(1, "optimal ratio", 1e-3, [] {
    const auto r = coilopt::solve_optimal_ratio();
    return Outcome{std::abs(r.n - 1.8365) <= 1e-3 && std::abs(r.residual) < 1e-12,
                   "n=" + num(r.n, 10) + " residual=" + num(r.residual, 3)};
  });

  criterion(2, "geometry reproduction", 1e-3, [] {
    const double d = coilopt::optimal_spacing(0.8404) * 1e3;
    return Outcome{std::abs(d - 457.6) <= 0.5, "spacing(840.4 mm)=" + num(d, 7) + " mm"};
  });

  criterion(3, "field-formula consistency", 30, [] {
    const auto& p = table2();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> zAxis(-0.6, 0.6), box(-0.35, 0.35);
    double worstAxis = 0, worstOracle = 0;
    for (int i = 0; i < 100; ++i) {
      const double z = zAxis(rng);
      const double a = magnetics::onaxis_field(p, z), f = magnetics::pair_field(p, {0, 0, z}).bz;
      worstAxis = std::max(worstAxis, std::abs(a - f) / std::abs(f));
    }
    for (int i = 0; i < 50; ++i) {
      const magnetics::Point q{box(rng), box(rng), box(rng)};
      const auto f = magnetics::pair_field(p, q);
      const auto o = oracle::pair(p, q, 1000000);
      const double err = std::max({std::abs(f.bx - o.bx), std::abs(f.by - o.by), std::abs(f.bz - o.bz)});
      worstOracle = std::max(worstOracle, err / o.norm());
      if (i < 10) {  // the on-axis closed form against the oracle too
        const auto oa = oracle::pair(p, {0, 0, q.z}, 1000000);
        worstOracle = std::max(worstOracle, std::abs(magnetics::onaxis_field(p, q.z) - oa.bz) / std::abs(oa.bz));
      }
    }
    return Outcome{worstAxis < 1e-9 && worstOracle < 1e-6,
                   "axis vs full " + num(worstAxis, 3) + ", vs line-integral oracle " + num(worstOracle, 3)};
  });

  criterion(4, "centre field", 1, [] {
    const double bz = std::abs(magnetics::pair_field(table2(), {0, 0, 0}).bz) * 1e6;
    return Outcome{std::abs(bz - 137.0) <= 0.02 * 137.0 && bz > 120.0, "|bz(0)|=" + num(bz, 6) + " uT"};
  });

  criterion(5, "uniform region", 10, [] {
    const auto& p = table2();
    const double thr[] = {0.1, 0.5, 1, 5, 10, 20};
    double prev = -1;
    bool mono = true;
    std::string ext;
    double at5 = 0;
    for (double t : thr) {
      const auto r = coilopt::uniform_region(p, t);
      mono = mono && r.extentXoverD >= prev && r.extentYoverD >= 0;
      prev = r.extentXoverD;
      if (t == 5) at5 = r.extentXoverD;
      ext += num(r.extentXoverD, 4) + (t == 20 ? "" : " ");
    }
    return Outcome{mono && std::abs(at5 - 0.515) <= 0.0515, "+-x/d = " + ext};
  });

  criterion(6, "sys-id orderings", 60, [] {
    bool ok = true;
    std::string detail;
    for (const char* preset : {"table4-10db", "table4-30db"}) {
      const auto r = sysid_rows(preset);
      const auto& L = r.at("lms");
      const auto& S = r.at("svs");
      const auto& A = r.at("atlms");
      const auto& C = r.at("convex");
      const bool speed = C.itersToConverge >= 0 && L.itersToConverge >= 5 * C.itersToConverge;
      const bool near = std::abs(C.finalMse / L.finalMse - 1.0) <= 0.25;
      const bool below = C.finalMse < S.finalMse && C.finalMse < A.finalMse;
      ok = ok && speed && near && below;
      detail += std::string(preset) + ": it L/C " + std::to_string(L.itersToConverge) + "/" +
                std::to_string(C.itersToConverge) + (speed ? "" : "(!)") + " mse C/L/S/A " + num(C.finalMse, 5) + "/" +
                num(L.finalMse, 5) + "/" + num(S.finalMse, 5) + "/" + num(A.finalMse, 5) +
                (near && below ? "" : "(!)") + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(7, "step-response orderings", 30, [] {
    bool ok = true;
    std::string detail;
    for (const char* preset : {"table7-up", "table7-down"}) {
      const auto r = step_rows(preset);
      const auto& L = r.at("lms");
      const auto& S = r.at("svs");
      const auto& A = r.at("atlms");
      const auto& C = r.at("convex");
      const bool reach = C.reachTargetTimeS >= 0 && (L.reachTargetTimeS < 0 || L.reachTargetTimeS > C.reachTargetTimeS);
      const bool rmse = S.rmseSteady > 1.1 * A.rmseSteady && A.rmseSteady > 1.1 * C.rmseSteady &&
                        C.rmseSteady > 1.1 * L.rmseSteady;
      const bool span = (C.fluctMaxNT - C.fluctMinNT) < 0.5 * (S.fluctMaxNT - S.fluctMinNT);
      ok = ok && reach && rmse && span;
      detail += std::string(preset) + ": reach L/C " + num(L.reachTargetTimeS, 3) + "/" + num(C.reachTargetTimeS, 3) +
                (reach ? "" : "(!)") + " rmse S/A/C/L " + num(S.rmseSteady, 4) + "/" + num(A.rmseSteady, 4) + "/" +
                num(C.rmseSteady, 4) + "/" + num(L.rmseSteady, 4) + (rmse ? "" : "(!)") + " span C/S " +
                num(C.fluctMaxNT - C.fluctMinNT, 4) + "/" + num(S.fluctMaxNT - S.fluctMinNT, 4) + (span ? "" : "(!)") +
                "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(8, "convergence condition", 10, [] {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    std::vector<std::vector<double>> xs;
    double prev = n01(rng);
    for (int i = 0; i < 100000; ++i) {
      const double cur = n01(rng);
      xs.push_back({cur, prev});
      prev = cur;
    }
    bool ok = true;
    std::string detail;
    for (const char* preset : {"table4-10db", "table4-30db"}) {
      const auto cfg = config::load_preset(preset);
      auto scn = cli::sysid_from(cfg);
      scn.trials = 50;
      scn.nIters = 2000;
      scn.reinjectionAt = 0;
      auto params = cli::method_params_from(cfg);
      const auto good = control::check_convergence_condition(params.convex, xs);
      const auto run = experiments::run_sysid(scn, Method::Convex, params);
      const auto probe = experiments::run_divergence_probe(scn, Method::Convex, params);
      const bool goodOk = good.ok() && run.itersToConverge >= 0 && !probe.diverged;

      // beta/(phi + min x'x) pushed to ten times 2/lambda_max, and C likewise
      params.convex.beta = 10.0 * good.limit * (params.convex.phi + good.minPower);
      params.convex.c = 10.0 * good.limit;
      const auto bad = control::check_convergence_condition(params.convex, xs);
      const auto div = experiments::run_divergence_probe(scn, Method::Convex, params);
      const bool badOk = !bad.nlmsOk && !bad.cOk && div.diverged;
      ok = ok && goodOk && badOk;
      detail += std::string(preset) + ": compliant " + (goodOk ? "passes+converges" : "FAILED") +
                ", 10x violation " + (badOk ? "flagged+diverges" : "NOT DETECTED") + " (mse " +
                num(div.mseEarly, 3) + " -> " + num(div.mseLate, 3) + "); ";
    }
    return Outcome{ok, detail};
  });

  criterion(9, "controller invariants", 10, [] {
    std::mt19937_64 rng(9);
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto randParams = [&] {
      control::ConvexParams p;
      p.alpha = u(0, 2000), p.beta = u(1e-3, 0.5), p.sigma = u(0, 10), p.phi = u(0, 2), p.c = u(1e-3, 0.5);
      p.muB = u(0, 100), p.gammaO = u(0.05, 0.95), p.tO = 1 + static_cast<int>(rng() % 5);
      p.fitK = u(-2, 2), p.fitB = u(-2, 2), p.bMax = u(0.5, 8);
      return p;
    };
    auto randState = [&](double bMax) {
      auto s = control::ConvexState::init({u(-2, 2), u(-2, 2)}, u(-bMax, bMax));
      s.w2 = {u(-2, 2), u(-2, 2)};
      s.prevE1 = u(-1, 1);
      s.stepIndex = rng() % 100;
      return s;
    };
    int bad[5] = {0, 0, 0, 0, 0};
    for (int k = 0; k < 1000; ++k) {
      const auto p = randParams();
      const std::vector<double> x{u(-3, 3), u(-3, 3)};
      const double d = u(-5, 5);
      // gamma range and convex identity
      auto s = randState(p.bMax);
      const double g = s.gamma;
      const auto o = control::convex_step(s, p, {x, d});
      if (!(o.gamma > 0 && o.gamma < 1)) ++bad[0];
      if (std::abs(o.e - (g * o.e1 + (1 - g) * o.e2)) > 1e-12) ++bad[1];
      // transfer iff the condition holds
      auto t = randState(p.bMax);
      const bool cond = t.gamma > p.gammaO && t.stepIndex % static_cast<std::uint64_t>(p.tO) == 0;
      const auto w2 = t.w2;
      const auto ot = control::convex_step(t, p, {x, d});
      const bool transferred = t.w2 == t.w1;
      const bool plain = t.w2[0] == w2[0] + p.c * ot.e2 * x[0] && t.w2[1] == w2[1] + p.c * ot.e2 * x[1];
      if (cond ? !transferred : !plain) ++bad[2];
      // b increment antisymmetric in e
      auto q = p;
      q.bMax = 1e6;
      const auto s0 = randState(3.0);
      auto a = s0, b = s0;
      const double y = s0.gamma * (s0.w1[0] * x[0] + s0.w1[1] * x[1]) +
                       (1 - s0.gamma) * (s0.w2[0] * x[0] + s0.w2[1] * x[1]) + q.fitK * x[1] + q.fitB;
      control::convex_step(a, q, {x, d});
      control::convex_step(b, q, {x, 2 * y - d});
      if (std::abs((a.b - s0.b) + (b.b - s0.b)) > 1e-12 * (1 + std::abs(a.b - s0.b))) ++bad[3];
      // degenerate gamma
      for (double b0 : {40.0, -40.0}) {
        auto z = randState(1.0);
        z.b = b0;
        z.gamma = control::logistic(b0);
        const auto oz = control::convex_step(z, p, {x, d});
        if (std::abs(oz.y - (b0 > 0 ? oz.y1 : oz.y2)) > 1e-9) ++bad[4];
      }
    }
    const int total = bad[0] + bad[1] + bad[2] + bad[3] + bad[4];
    return Outcome{total == 0, "violations gamma/identity/transfer/antisym/limits = " + std::to_string(bad[0]) + "/" +
                                   std::to_string(bad[1]) + "/" + std::to_string(bad[2]) + "/" +
                                   std::to_string(bad[3]) + "/" + std::to_string(bad[4]) + " over 1000 cases each"};
  });

  criterion(10, "stability statistics", 60, [] {
    const auto cfg = config::load_preset("table4-30db");
    auto scn = cli::sysid_from(cfg);
    scn.trials = 2000;
    const auto params = cli::method_params_from(cfg);
    const auto r = experiments::run_stability_stat(scn, Method::Convex, params, 2000);
    const bool unpaired = std::abs(r.meanE2 - r.predictedE2) <= 3.0 * std::hypot(r.seE2, r.seEps2 + r.seMismatch);
    return Outcome{r.e2MatchesPrediction && unpaired && r.e2AboveNoise,
                   "E[e^2]=" + num(r.meanE2, 5) + " +- " + num(r.seE2, 2) + ", sigma^2+mismatch=" +
                       num(r.meanEps2, 5) + "+" + num(r.mismatch, 3) + " over " + std::to_string(r.trials) +
                       " trials"};
  });

  criterion(11, "determinism", 600, [] {
    const fs::path root = fs::temp_directory_path() / "hilsim_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands = {
        {"optimize", "--side-mm", "840.4"},
        {"field-map"},
        {"sysid", "--snr-db", "10", "--preset", "table4", "--set", "sysid.trials=20"},
        {"sysid", "--snr-db", "30", "--preset", "table4", "--set", "sysid.trials=20"},
        {"step", "--preset", "table7", "--seed", "42"},
        {"check"},
    };
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < commands.size(); ++i) {
      std::string outputs[2];
      for (int rep = 0; rep < 2; ++rep) {
        auto args = commands[i];
        const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(rep));
        args.insert(args.end(), {"--out-dir", dir.string()});
        std::ostringstream out, err;
        if (cli::run(args, out, err) != 0) {
          ok = false;
          detail += commands[i][0] + " failed: " + err.str();
        }
        std::string text = out.str();  // the output directory itself is the one intended difference
        for (std::size_t at; (at = text.find(dir.string())) != std::string::npos;)
          text.replace(at, dir.string().size(), "<out>");
        outputs[rep] = text + (fs::exists(dir) ? slurp_tree(dir) : std::string());
      }
      const bool same = outputs[0] == outputs[1];
      ok = ok && same;
      detail += commands[i][0] + (same ? " same" : " DIFFERS") + (i + 1 < commands.size() ? ", " : "");
    }
    fs::remove_all(root);
    return Outcome{ok, detail};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
