#include "hilsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hilsim/csv.hpp"

namespace hilsim::plant {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

PlantModel PlantModel::ascending() { return {46.333, 1.7623, 0.0, 3.0, 200.0}; }
PlantModel PlantModel::descending() { return {46.253, 1.8935, 0.0, 3.0, 200.0}; }

void validate(const PlantModel& plant) {
  if (!std::isfinite(plant.fitK) || !std::isfinite(plant.fitB))
    throw std::invalid_argument("plant fit must be finite");
  if (!(plant.vMin < plant.vMax)) throw std::invalid_argument("plant requires v_min < v_max");
  if (!(plant.sampleRateHz > 0.0)) throw std::invalid_argument("plant sample rate must be > 0");
}

double drive(const PlantModel& plant, double voltage) {
  const double v = std::clamp(voltage, plant.vMin, plant.vMax);
  return (plant.fitK * v + plant.fitB) * 1000.0;
}

double inverse_drive(const PlantModel& plant, double targetNT) {
  if (std::abs(plant.fitK) < 1e-12) throw DegenerateFit();
  const double v = (targetNT / 1000.0 - plant.fitB) / plant.fitK;
  return std::clamp(v, plant.vMin, plant.vMax);
}

bool clamps(const PlantModel& plant, double voltage) {
  return voltage < plant.vMin || voltage > plant.vMax;
}

SensorSpec SensorSpec::hmc5883l() { return {200.0, 435.0, 75.0}; }
SensorSpec SensorSpec::rm3100() { return {15.0, 13.0, 200.0}; }
SensorSpec SensorSpec::ideal(double sampleRateHz) { return {0.0, 0.0, sampleRateHz}; }

void validate(const SensorSpec& spec) {
  if (!(spec.noiseSigma >= 0.0)) throw std::invalid_argument("sensor noise sigma must be >= 0");
  if (!(spec.quantizationStep >= 0.0)) throw std::invalid_argument("sensor quantization step must be >= 0");
  if (!(spec.sampleRateHz > 0.0)) throw std::invalid_argument("sensor sample rate must be > 0");
}

double quantize(double value, double step) {
  if (step == 0.0) return value;
  // nearbyint honours the default round-to-nearest-even mode
  return std::nearbyint(value / step) * step;
}

double sense(const SensorSpec& spec, double trueNT, std::mt19937_64& rng) {
  double v = trueNT;
  if (spec.noiseSigma > 0.0) v += std::normal_distribution<double>(0.0, spec.noiseSigma)(rng);
  return quantize(v, spec.quantizationStep);
}

void validate(const DisturbanceSpec& spec) {
  if (!std::isfinite(spec.dcOffset)) throw std::invalid_argument("disturbance dc offset must be finite");
  if (!(spec.gaussianSigma >= 0.0)) throw std::invalid_argument("disturbance sigma must be >= 0");
  if (!(spec.sampleRateHz > 0.0)) throw std::invalid_argument("disturbance sample rate must be > 0");
  for (const auto& c : spec.ac) {
    if (!(c.amplitude >= 0.0)) throw std::invalid_argument("disturbance amplitude must be >= 0");
    if (!(c.frequencyHz > 0.0)) throw std::invalid_argument("disturbance frequency must be > 0");
  }
}

double disturbance_at_index(const DisturbanceSpec& spec, std::uint64_t index) {
  const double t = static_cast<double>(index) / spec.sampleRateHz;
  double v = spec.dcOffset;
  for (const auto& c : spec.ac) v += c.amplitude * std::sin(kTwoPi * c.frequencyHz * t + c.phase);
  if (spec.gaussianSigma > 0.0) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index)));
    v += std::normal_distribution<double>(0.0, spec.gaussianSigma)(rng);
  }
  return v;
}

double disturbance_at(const DisturbanceSpec& spec, double t) {
  const double k = std::max(0.0, std::round(t * spec.sampleRateHz));
  return disturbance_at_index(spec, static_cast<std::uint64_t>(k));
}

double TargetProfile::value_at(double t) const {
  switch (kind) {
    case ProfileKind::Constant: return level;
    case ProfileKind::StepUp:
    case ProfileKind::StepDown: return t < switchTime ? from : level;
    case ProfileKind::RampUp: {
      if (t <= switchTime) return from;
      if (rampDuration <= 0.0 || t >= switchTime + rampDuration) return level;
      return from + (level - from) * (t - switchTime) / rampDuration;
    }
    case ProfileKind::FromFile: {
      if (points.empty()) return 0.0;
      if (t <= points.front().first) return points.front().second;
      if (t >= points.back().first) return points.back().second;
      auto hi = std::lower_bound(points.begin(), points.end(), t,
                                 [](const auto& p, double v) { return p.first < v; });
      auto lo = hi - 1;
      const double f = (t - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return level;
}

double TargetProfile::step_magnitude() const {
  if (kind == ProfileKind::Constant) return std::abs(level);
  if (kind == ProfileKind::FromFile) {
    if (points.empty()) return 0.0;
    return std::abs(points.back().second - points.front().second);
  }
  return std::abs(level - from);
}

TargetProfile TargetProfile::step(double from, double to, double switchTime) {
  TargetProfile p;
  p.kind = to >= from ? ProfileKind::StepUp : ProfileKind::StepDown;
  p.from = from;
  p.level = to;
  p.switchTime = switchTime;
  return p;
}

TargetProfile TargetProfile::constant(double level) {
  TargetProfile p;
  p.level = level;
  return p;
}

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "constant") return ProfileKind::Constant;
  if (name == "step_up") return ProfileKind::StepUp;
  if (name == "step_down") return ProfileKind::StepDown;
  if (name == "ramp_up") return ProfileKind::RampUp;
  if (name == "from_file") return ProfileKind::FromFile;
  throw std::invalid_argument("unknown profile kind '" + name + "'");
}

const char* profile_kind_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::StepUp: return "step_up";
    case ProfileKind::StepDown: return "step_down";
    case ProfileKind::RampUp: return "ramp_up";
    case ProfileKind::FromFile: return "from_file";
  }
  return "constant";
}

TargetProfile load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file '" + path + "'");
  TargetProfile p;
  p.kind = ProfileKind::FromFile;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) continue;
    try {
      const double t = std::stod(a);
      const double v = std::stod(b);
      p.points.emplace_back(t, v);
    } catch (const std::exception&) {
      if (lineNo == 1) continue;  // header
      throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": malformed profile row");
    }
  }
  if (p.points.empty()) throw std::runtime_error("profile file '" + path + "' has no rows");
  std::stable_sort(p.points.begin(), p.points.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  p.from = p.points.front().second;
  p.level = p.points.back().second;
  return p;
}

double snr_to_sigma(double signalPower, double snrDb) {
  return std::sqrt(signalPower / std::pow(10.0, snrDb / 10.0));
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "t_s,true_nT,disturbance_nT,measured_nT\n";
  for (const auto& r : rows) {
    csv::append(out, r.t);
    out.push_back(',');
    csv::append(out, r.trueNT);
    out.push_back(',');
    csv::append(out, r.disturbanceNT);
    out.push_back(',');
    csv::append(out, r.measuredNT);
    out.push_back('\n');
  }
  return out;
}

}  // namespace hilsim::plant
