#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilsim/control.hpp"
#include "hilsim/plant.hpp"

namespace hilsim::experiments {

struct MetricsReport {
  // closed-loop metrics (step response)
  double reachTargetTimeS = -1.0;  // -1 when the band is never held
  double meanSteadyNT = 0.0;
  double rmseSteady = 0.0;
  double fluctMinNT = 0.0;
  double fluctMaxNT = 0.0;
  // identification metrics
  std::vector<double> mseCurve;
  long itersToConverge = -1;
  double finalMse = 0.0;
  long reconvergeIters = -1;  // after the noise burst, -1 if none or never
  double peakAfterBurst = 0.0;
  // bookkeeping
  double saturatedFraction = 0.0;
  bool saturationWarning = false;
};

/// Identification of an unknown FIR system from a white tap-delay input.
struct SysIdScenario {
  double snrDb = 30.0;  // +inf means noise free
  int order = 2;
  long nIters = 5000;
  long reinjectionAt = 2500;     // <= 0 disables the noise burst
  long reinjectionLength = 50;   // samples
  double reinjectionGain = 10.0; // burst noise sigma / nominal sigma
  std::vector<double> trueWeights{0.8, 0.5};
  std::vector<double> initialWeights{0.0, 0.0};
  int trials = 200;
  std::uint64_t seed = 1;
  int smoothWindow = 20;
  double tailFraction = 0.1;
  double convergeFactor = 1.05;
  int threads = 0;  // 0 = hardware concurrency
};

void validate(const SysIdScenario& scn);

/// Centred moving average (window/2 samples back, the rest ahead); shrinks at both ends.
std::vector<double> smooth(const std::vector<double>& v, int window);

/// Fills itersToConverge / finalMse / reconvergeIters from a raw trial-averaged curve.
void summarize_mse(MetricsReport& rep, const std::vector<double>& rawMse, const SysIdScenario& scn);

MetricsReport run_sysid(const SysIdScenario& scn, control::Method method, const control::MethodParams& params);

/// Runs one trial and returns the a-priori errors. Trials share inputs across methods.
std::vector<double> sysid_trial_errors(const SysIdScenario& scn, control::Method method,
                                       const control::MethodParams& params, int trial);

struct StepScenario {
  plant::TargetProfile profile = plant::TargetProfile::step(0.0, 120000.0, 0.5);
  plant::PlantModel plantAscending = plant::PlantModel::ascending();
  plant::PlantModel plantDescending = plant::PlantModel::descending();
  plant::PlantModel model = plant::PlantModel::ascending();  // what the controller inverts
  plant::SensorSpec sensor = plant::SensorSpec::hmc5883l();
  plant::DisturbanceSpec disturbance;
  double durationS = 4.0;
  double settleTimeS = 1.5;  // after the switch
  double bandFraction = 0.02;
  double dwellS = 0.2;
  double fullScaleNT = 120000.0;  // controller works in units of this
  double errorScale = 1.0;        // error fed to the adaptation = e / errorScale
  double inputGain = 1.0;         // regressor amplitude
  std::uint64_t seed = 1;
};

void validate(const StepScenario& scn);

struct TraceRow {
  double t = 0.0;
  double target = 0.0;
  double measured = 0.0;
  double controlV = 0.0;
  double trueNT = 0.0;
  double disturbanceNT = 0.0;
};

struct StepRun {
  MetricsReport metrics;
  std::vector<TraceRow> trace;
};

StepRun run_step_response(const StepScenario& scn, control::Method method, const control::MethodParams& params);

/// Reach time, steady mean/RMSE and fluctuation range of a sampled series against a constant target.
/// `t0` is when the target switched; settle time and reach time are measured from it.
MetricsReport compute_metrics(const std::vector<double>& t, const std::vector<double>& values, double target,
                              double stepMagnitude, double t0, double settleTimeS, double bandFraction,
                              double dwellS = 0.2);

struct DivergenceReport {
  double mseEarly = 0.0;  // smoothed MSE at n = 50
  double mseLate = 0.0;   // smoothed MSE at n = 500
  bool diverged = false;
};

/// Short identification run with the given parameters; flags growth by more than 1e3.
DivergenceReport run_divergence_probe(const SysIdScenario& scn, control::Method method,
                                      const control::MethodParams& params);

struct StabilityReport {
  long atIter = 0;
  int trials = 0;
  double meanE2 = 0.0, seE2 = 0.0;
  double meanEps2 = 0.0, seEps2 = 0.0;
  double mismatch = 0.0, seMismatch = 0.0;       // E[(v'x)^2], v = wo - w
  double predictedE2 = 0.0;                      // E[eps^2] + mismatch
  double lag1 = 0.0, seLag1 = 0.0;               // E[e(n) e(n-1)]
  double lag1Mismatch = 0.0, seLag1Mismatch = 0.0;  // E[(v(n)'x(n)) (v(n-1)'x(n-1))]
  bool e2AboveNoise = false;
  bool e2MatchesPrediction = false;
  bool lag1MatchesMismatch = false;
};

/// Monte-Carlo check of the steady error decomposition for an LMS-family method.
StabilityReport run_stability_stat(const SysIdScenario& scn, control::Method method,
                                   const control::MethodParams& params, long atIter);

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string mse_curve_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string step_trace_csv(const std::vector<TraceRow>& rows);

}  // namespace hilsim::experiments
