#include <cmath>
#include <sstream>

#include "hilsim/cli.hpp"

namespace hilsim::cli {

using config::Config;
using config::ConfigError;

namespace {

std::vector<plant::AcComponent> parse_ac(const Config& cfg) {
  // "amp_nT:freq_Hz:phase_rad, ..." as one list
  std::vector<plant::AcComponent> out;
  for (const auto& item : cfg.get_strings("disturbance", "ac_components", {})) {
    std::istringstream in(item);
    std::string a, f, p;
    if (!std::getline(in, a, ':') || !std::getline(in, f, ':'))
      throw ConfigError("[disturbance] ac_components: expected amp:freq[:phase], got '" + item + "'");
    std::getline(in, p);
    try {
      out.push_back({std::stod(a), std::stod(f), p.empty() ? 0.0 : std::stod(p)});
    } catch (const std::exception&) {
      throw ConfigError("[disturbance] ac_components: bad number in '" + item + "'");
    }
  }
  return out;
}

}  // namespace

magnetics::HelmholtzPair pair_from(const Config& cfg) {
  magnetics::HelmholtzPair p;
  p.side = cfg.get_double("coil", "side_mm", 840.4) * 1e-3;
  p.spacing = cfg.get_double("coil", "spacing_mm", 457.6) * 1e-3;
  const long turns = cfg.get_long("coil", "turns", 24);
  if (turns < 1) throw ConfigError("[coil] turns must be >= 1");
  p.turns = static_cast<int>(turns);
  p.current = cfg.get_double("coil", "current_a", 2.94);
  magnetics::validate(p);
  return p;
}

magnetics::GridSpec grid_from(const Config& cfg) {
  magnetics::GridSpec g;
  g.xMin = cfg.get_double("grid", "x_min_mm", 0.0) * 1e-3;
  g.xMax = cfg.get_double("grid", "x_max_mm", 0.0) * 1e-3;
  g.yMin = cfg.get_double("grid", "y_min_mm", 0.0) * 1e-3;
  g.yMax = cfg.get_double("grid", "y_max_mm", 0.0) * 1e-3;
  g.zMin = cfg.get_double("grid", "z_min_mm", 0.0) * 1e-3;
  g.zMax = cfg.get_double("grid", "z_max_mm", 0.0) * 1e-3;
  const long nx = cfg.get_long("grid", "nx", 1), ny = cfg.get_long("grid", "ny", 1), nz = cfg.get_long("grid", "nz", 1);
  if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("[grid] point counts must be >= 1");
  if (nx * ny * nz > 50'000'000L) throw ConfigError("[grid] more than 5e7 points requested");
  g.nx = static_cast<std::size_t>(nx);
  g.ny = static_cast<std::size_t>(ny);
  g.nz = static_cast<std::size_t>(nz);
  return g;
}

magnetics::UniformityMode uniformity_mode_from(const Config& cfg) {
  const auto mode = cfg.get_string("grid", "uniformity", "z");
  if (mode == "z") return magnetics::UniformityMode::ZComponent;
  if (mode == "vector") return magnetics::UniformityMode::FullVector;
  throw ConfigError("[grid] uniformity must be 'z' or 'vector'");
}

control::MethodParams method_params_from(const Config& cfg) {
  control::MethodParams p;
  p.lms.mu = cfg.get_double("lms", "mu", p.lms.mu);
  p.svs.alpha = cfg.get_double("svs", "alpha", p.svs.alpha);
  p.svs.beta = cfg.get_double("svs", "beta", p.svs.beta);
  p.atlms.alpha = cfg.get_double("atlms", "alpha", p.atlms.alpha);
  p.atlms.beta = cfg.get_double("atlms", "beta", p.atlms.beta);
  p.atlms.m = cfg.get_double("atlms", "m", p.atlms.m);
  p.atlms.nScale = cfg.get_double("atlms", "n_scale", p.atlms.nScale);
  auto& c = p.convex;
  c.alpha = cfg.get_double("convex", "alpha", c.alpha);
  c.beta = cfg.get_double("convex", "beta", c.beta);
  c.sigma = cfg.get_double("convex", "sigma", c.sigma);
  c.phi = cfg.get_double("convex", "phi", c.phi);
  c.c = cfg.get_double("convex", "c", c.c);
  c.muB = cfg.get_double("convex", "mu_b", c.muB);
  c.gammaO = cfg.get_double("convex", "gamma_o", c.gammaO);
  c.tO = static_cast<int>(cfg.get_long("convex", "t_o", c.tO));
  c.fitK = cfg.get_double("convex", "fit_k", c.fitK);
  c.fitB = cfg.get_double("convex", "fit_b", c.fitB);
  c.bMax = cfg.get_double("convex", "b_max", c.bMax);
  try {
    control::validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[convex] ") + e.what());
  }
  return p;
}

std::vector<control::Method> methods_from(const Config& cfg) {
  std::vector<control::Method> out;
  for (const auto& name : cfg.get_strings("run", "methods", {"lms", "svs", "atlms", "convex"})) {
    try {
      out.push_back(control::parse_method(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[run] methods: ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("[run] methods is empty");
  return out;
}

experiments::SysIdScenario sysid_from(const Config& cfg) {
  experiments::SysIdScenario s;
  s.snrDb = cfg.get_double("sysid", "snr_db", s.snrDb);
  s.order = static_cast<int>(cfg.get_long("sysid", "order", s.order));
  s.nIters = cfg.get_long("sysid", "iterations", s.nIters);
  s.reinjectionAt = cfg.get_long("sysid", "reinjection_at", s.reinjectionAt);
  s.reinjectionLength = cfg.get_long("sysid", "reinjection_len", s.reinjectionLength);
  s.reinjectionGain = cfg.get_double("sysid", "reinjection_gain", s.reinjectionGain);
  s.trueWeights = cfg.get_doubles("sysid", "true_weights", s.trueWeights);
  s.initialWeights = cfg.get_doubles("sysid", "initial_weights", std::vector<double>(s.order, 0.0));
  s.trials = static_cast<int>(cfg.get_long("sysid", "trials", s.trials));
  s.smoothWindow = static_cast<int>(cfg.get_long("sysid", "smooth_window", s.smoothWindow));
  s.tailFraction = cfg.get_double("sysid", "tail_fraction", s.tailFraction);
  s.convergeFactor = cfg.get_double("sysid", "converge_factor", s.convergeFactor);
  s.seed = cfg.get_u64("run", "seed", s.seed);
  s.threads = static_cast<int>(cfg.get_long("run", "threads", 0));
  try {
    experiments::validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[sysid] ") + e.what());
  }
  return s;
}

experiments::StepScenario step_from(const Config& cfg) {
  experiments::StepScenario s;
  plant::PlantModel up = plant::PlantModel::ascending();
  plant::PlantModel down = plant::PlantModel::descending();
  up.fitK = cfg.get_double("plant", "fit_k_ut_per_v", up.fitK);
  up.fitB = cfg.get_double("plant", "fit_b_ut", up.fitB);
  down.fitK = cfg.get_double("plant", "fit_k_desc_ut_per_v", down.fitK);
  down.fitB = cfg.get_double("plant", "fit_b_desc_ut", down.fitB);
  for (auto* p : {&up, &down}) {
    p->vMin = cfg.get_double("plant", "v_min_v", p->vMin);
    p->vMax = cfg.get_double("plant", "v_max_v", p->vMax);
  }

  const auto model = cfg.get_string("sensor", "model", "hmc5883l");
  if (model == "hmc5883l") s.sensor = plant::SensorSpec::hmc5883l();
  else if (model == "rm3100") s.sensor = plant::SensorSpec::rm3100();
  else if (model == "ideal") s.sensor = plant::SensorSpec::ideal();
  else if (model != "custom") throw ConfigError("[sensor] model must be hmc5883l, rm3100, ideal or custom");
  s.sensor.noiseSigma = cfg.get_double("sensor", "noise_nt", s.sensor.noiseSigma);
  s.sensor.quantizationStep = cfg.get_double("sensor", "quant_step_nt", s.sensor.quantizationStep);
  s.sensor.sampleRateHz = cfg.get_double("sensor", "rate_hz", s.sensor.sampleRateHz);
  up.sampleRateHz = down.sampleRateHz = s.sensor.sampleRateHz;

  s.disturbance.dcOffset = cfg.get_double("disturbance", "dc_nt", 0.0);
  s.disturbance.gaussianSigma = cfg.get_double("disturbance", "gauss_sigma_nt", 0.0);
  s.disturbance.ac = parse_ac(cfg);
  s.disturbance.seed = cfg.get_u64("disturbance", "seed", 0);
  s.disturbance.sampleRateHz = s.sensor.sampleRateHz;

  const auto kind = cfg.get_string("profile", "kind", "step_up");
  try {
    if (kind == "from_file") {
      s.profile = plant::load_profile_csv(cfg.get_string("profile", "file", ""));
    } else {
      s.profile.kind = plant::parse_profile_kind(kind);
      s.profile.from = cfg.get_double("profile", "from_nt", 0.0);
      s.profile.level = cfg.get_double("profile", "to_nt", 120000.0);
      s.profile.switchTime = cfg.get_double("profile", "switch_s", 0.5);
      s.profile.rampDuration = cfg.get_double("profile", "ramp_s", 1.0);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[profile] ") + e.what());
  }

  s.plantAscending = up;
  s.plantDescending = down;
  const bool descending = s.profile.kind == plant::ProfileKind::StepDown ||
                          s.profile.value_at(1e12) < s.profile.value_at(-1e12);
  s.model = descending ? down : up;

  s.durationS = cfg.get_double("step", "duration_s", s.durationS);
  s.settleTimeS = cfg.get_double("step", "settle_s", s.settleTimeS);
  s.bandFraction = cfg.get_double("step", "band_fraction", s.bandFraction);
  s.dwellS = cfg.get_double("step", "dwell_s", s.dwellS);
  s.fullScaleNT = cfg.get_double("step", "full_scale_nt", s.fullScaleNT);
  s.errorScale = cfg.get_double("step", "error_scale_nt", s.errorScale);
  s.inputGain = cfg.get_double("step", "input_gain", s.inputGain);
  s.seed = cfg.get_u64("run", "seed", s.seed);
  try {
    experiments::validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[step] ") + e.what());
  }
  return s;
}

}  // namespace hilsim::cli
