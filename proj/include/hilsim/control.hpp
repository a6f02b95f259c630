#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilsim::control {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the two-filter convex combination controller.
struct ConvexParams {
  double alpha = 500.0;
  double beta = 0.01;
  double sigma = 0.0;
  double phi = 0.5;
  double c = 0.03;
  double muB = 0.1;
  double gammaO = 0.55;
  int tO = 2;
  double fitK = 0.0;  // bias B = fitK * x.back() + fitB
  double fitB = 0.0;
  double bMax = 4.0;  // |b| is clipped here after each update
};

void validate(const ConvexParams& p);

struct ConvexState {
  std::vector<double> w1, w2;
  double b = 0.0;
  double gamma = 0.5;
  double prevE1 = 0.0;
  std::uint64_t stepIndex = 0;

  static ConvexState init(std::vector<double> w0, double b0 = 0.0);
};

struct StepInput {
  std::span<const double> x;
  double d = 0.0;
};

struct StepOutput {
  double y = 0.0, y1 = 0.0, y2 = 0.0;
  double e = 0.0, e1 = 0.0, e2 = 0.0;
  double gamma = 0.0, b = 0.0;
  double mu1 = 0.0;
};

double logistic(double v);

/// Learning rate of the fast filter; clipped to [0, beta/2].
double convex_mu1(const ConvexParams& p, double e1, double prevE1);

/// One step of the six-process update. Mutates `state`.
StepOutput convex_step(ConvexState& state, const ConvexParams& params, const StepInput& in);

/// Single-filter state shared by the baselines.
struct FilterState {
  std::vector<double> w;
  std::uint64_t stepIndex = 0;
};

struct Bias {
  double k = 0.0;
  double b = 0.0;
};

StepOutput lms_step(FilterState& state, double mu, const StepInput& in, Bias bias = {});

/// mu = beta * (logistic(alpha*|e|) - 0.5)
double svs_mu(double alpha, double beta, double e);
StepOutput svs_step(FilterState& state, double alpha, double beta, const StepInput& in, Bias bias = {});

/// mu = beta * (2/pi) * atan(alpha*e^2) * m / (m + nScale)
double atlms_mu(double alpha, double beta, double m, double nScale, double e);
StepOutput atlms_step(FilterState& state, double alpha, double beta, double m, double nScale,
                      const StepInput& in, Bias bias = {});

struct ConditionReport {
  double lambdaMax = 0.0;
  double limit = 0.0;        // 2 / lambdaMax
  double minPower = 0.0;     // min over samples of x'x
  double nlmsBound = 0.0;    // beta / (phi + minPower)
  bool betaPositive = false;
  bool nlmsOk = false;
  bool cOk = false;
  int powerIterations = 0;
  bool ok() const { return betaPositive && nlmsOk && cOk; }
};

/// Largest eigenvalue of a symmetric matrix (row-major, m x m) by power iteration.
double lambda_max(const std::vector<double>& r, std::size_t m, double tol = 1e-10, int* iterations = nullptr);

ConditionReport check_convergence_condition(const ConvexParams& params,
                                            const std::vector<std::vector<double>>& xSamples);

enum class Method { Lms, Svs, Atlms, Convex };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct LmsParams {
  double mu = 0.005;
};
struct SvsParams {
  double alpha = 4.0;
  double beta = 0.15;
};
struct AtlmsParams {
  double alpha = 500.0;
  double beta = 0.01;
  double m = 900.0;
  double nScale = 500.0;
};

/// Parameter sets for all four methods. Only the entry for the active method is used.
struct MethodParams {
  LmsParams lms;
  SvsParams svs;
  AtlmsParams atlms;
  ConvexParams convex;
  Bias bias;  // baselines; the convex controller uses convex.fitK/fitB
};

/// Uniform front end over the four controllers.
class Controller {
 public:
  Controller(Method method, const MethodParams& params, std::vector<double> w0);

  StepOutput step(std::span<const double> x, double d);
  Method method() const { return method_; }
  /// Weights that produce y (w1 and w2 blended by gamma for the convex method).
  std::vector<double> effective_weights() const;
  const ConvexState& convex_state() const { return convex_; }
  const FilterState& filter_state() const { return filter_; }

 private:
  Method method_;
  MethodParams params_;
  ConvexState convex_;
  FilterState filter_;
};

struct DiagnosticRow {
  std::uint64_t n = 0;
  StepOutput out;
};

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows);

}  // namespace hilsim::control
