#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilsim::plant {

/// Linear voltage-to-field map of the coil drive. fitK in uT/V, fitB in uT.
struct PlantModel {
  double fitK = 46.333;
  double fitB = 1.7623;
  double vMin = 0.0;
  double vMax = 3.0;
  double sampleRateHz = 200.0;

  static PlantModel ascending();
  static PlantModel descending();
};

class DegenerateFit : public std::domain_error {
 public:
  DegenerateFit() : std::domain_error("plant fit slope is zero; cannot invert") {}
};

void validate(const PlantModel& plant);

/// Field in nT produced by `voltage` after clamping to [vMin, vMax].
double drive(const PlantModel& plant, double voltage);

/// Voltage that produces `targetNT`, clamped to the actuation range.
double inverse_drive(const PlantModel& plant, double targetNT);

/// True when `voltage` lies outside the actuation range.
bool clamps(const PlantModel& plant, double voltage);

struct SensorSpec {
  double noiseSigma = 0.0;        // nT
  double quantizationStep = 0.0;  // nT per LSB, 0 = continuous
  double sampleRateHz = 200.0;

  static SensorSpec hmc5883l();
  static SensorSpec rm3100();
  static SensorSpec ideal(double sampleRateHz = 200.0);
};

void validate(const SensorSpec& spec);

/// Round half to even onto a multiple of `step`.
double quantize(double value, double step);

/// One magnetometer read of `trueNT`.
double sense(const SensorSpec& spec, double trueNT, std::mt19937_64& rng);

struct AcComponent {
  double amplitude = 0.0;  // nT
  double frequencyHz = 1.0;
  double phase = 0.0;  // rad
};

struct DisturbanceSpec {
  double dcOffset = 0.0;  // nT
  std::vector<AcComponent> ac;
  double gaussianSigma = 0.0;  // nT
  std::uint64_t seed = 0;
  double sampleRateHz = 200.0;  // maps t to a sample index for the random part
};

void validate(const DisturbanceSpec& spec);

/// Disturbance at sample `index`. The Gaussian part depends only on (seed, index).
double disturbance_at_index(const DisturbanceSpec& spec, std::uint64_t index);

/// Disturbance at time t; t is rounded to the nearest sample of spec.sampleRateHz.
double disturbance_at(const DisturbanceSpec& spec, double t);

enum class ProfileKind { Constant, StepUp, StepDown, RampUp, FromFile };

/// Target field as a function of time, nT.
struct TargetProfile {
  ProfileKind kind = ProfileKind::Constant;
  double from = 0.0;        // level before the switch (StepUp/StepDown/RampUp)
  double level = 0.0;       // final level (or the constant)
  double switchTime = 0.0;  // s
  double rampDuration = 1.0;
  std::vector<std::pair<double, double>> points;  // FromFile: (t_s, nT), sorted by t

  double value_at(double t) const;
  /// |final − initial|, the scale the reach band is measured against.
  double step_magnitude() const;

  static TargetProfile step(double from, double to, double switchTime);
  static TargetProfile constant(double level);
};

ProfileKind parse_profile_kind(const std::string& name);
const char* profile_kind_name(ProfileKind kind);

/// Reads "t_s,target_nT" rows (header optional) for a FromFile profile.
TargetProfile load_profile_csv(const std::string& path);

/// sigma = sqrt(signalPower / 10^(snrDb/10)).
double snr_to_sigma(double signalPower, double snrDb);

/// Location field constants (nT) used as constant targets.
struct LocationField {
  double north = 29950.1;
  double east = 21290.2;
  double up = -51917.4;  // z is vertically upward
};

struct TraceRow {
  double t = 0.0;
  double trueNT = 0.0;
  double disturbanceNT = 0.0;
  double measuredNT = 0.0;
};

std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace hilsim::plant
