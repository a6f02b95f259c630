#include "hilsim/control.hpp"

#include <algorithm>
#include <cmath>

#include "hilsim/csv.hpp"

namespace hilsim::control {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_input(std::size_t m, const StepInput& in) {
  if (in.x.size() != m)
    throw DimensionMismatch("input length " + std::to_string(in.x.size()) + " does not match filter order " +
                            std::to_string(m));
  if (!std::isfinite(in.d)) throw NonFiniteInput("target d is not finite");
  for (double v : in.x)
    if (!std::isfinite(v)) throw NonFiniteInput("input vector has a non-finite component");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double bias_of(double k, double b, std::span<const double> x) { return k * x.back() + b; }

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Shared body of the three single-filter baselines once the step size is known.
template <class MuFn>
StepOutput filter_step(FilterState& s, const StepInput& in, Bias bias, MuFn muOf) {
  check_input(s.w.size(), in);
  StepOutput o;
  o.y = dot(s.w, in.x) + bias_of(bias.k, bias.b, in.x);
  o.e = in.d - o.y;
  const double mu = muOf(o.e);
  for (std::size_t i = 0; i < s.w.size(); ++i) s.w[i] += mu * o.e * in.x[i];
  o.y1 = o.y2 = o.y;
  o.e1 = o.e2 = o.e;
  o.gamma = 1.0;
  o.mu1 = mu;
  ++s.stepIndex;
  return o;
}

}  // namespace

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void validate(const ConvexParams& p) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("convex: beta must be > 0");
  if (!(p.phi >= 0.0)) throw std::invalid_argument("convex: phi must be >= 0");
  if (!(p.c > 0.0)) throw std::invalid_argument("convex: c must be > 0");
  if (!(p.gammaO > 0.0 && p.gammaO < 1.0)) throw std::invalid_argument("convex: gamma_o must be in (0,1)");
  if (p.tO < 1) throw std::invalid_argument("convex: t_o must be >= 1");
  if (!(p.bMax > 0.0)) throw std::invalid_argument("convex: b_max must be > 0");
  if (!std::isfinite(p.alpha) || !std::isfinite(p.sigma) || !std::isfinite(p.muB) ||
      !std::isfinite(p.fitK) || !std::isfinite(p.fitB))
    throw std::invalid_argument("convex: parameters must be finite");
}

ConvexState ConvexState::init(std::vector<double> w0, double b0) {
  ConvexState s;
  s.w1 = w0;
  s.w2 = std::move(w0);
  s.b = b0;
  s.gamma = logistic(b0);
  return s;
}

double convex_mu1(const ConvexParams& p, double e1, double prevE1) {
  // exponent argument bounded so exp never overflows; the logistic is flat there anyway
  const double arg = std::clamp(p.alpha * std::abs(e1 * prevE1) - p.sigma * std::abs(e1), -700.0, 700.0);
  const double mu = p.beta * (logistic(arg) - 0.5);
  return std::clamp(mu, 0.0, 0.5 * p.beta);
}

StepOutput convex_step(ConvexState& s, const ConvexParams& p, const StepInput& in) {
  if (s.w1.size() != s.w2.size()) throw DimensionMismatch("w1 and w2 differ in length");
  check_input(s.w1.size(), in);
  const std::size_t m = s.w1.size();
  StepOutput o;

  // (1) outputs
  const double bias = bias_of(p.fitK, p.fitB, in.x);
  o.y1 = dot(s.w1, in.x) + bias;
  o.y2 = dot(s.w2, in.x) + bias;
  o.y = s.gamma * o.y1 + (1.0 - s.gamma) * o.y2;

  // (2) errors
  o.e1 = in.d - o.y1;
  o.e2 = in.d - o.y2;
  o.e = in.d - o.y;

  // (3) learning rates
  o.mu1 = convex_mu1(p, o.e1, s.prevE1);

  // (4) weight updates
  const double norm = p.phi + dot(in.x, in.x);
  const double g1 = norm > 0.0 ? 2.0 * o.mu1 * o.e1 / norm : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s.w1[i] += g1 * in.x[i];
    s.w2[i] += p.c * o.e2 * in.x[i];
  }

  // (5) transfer
  if (s.gamma > p.gammaO && s.stepIndex % static_cast<std::uint64_t>(p.tO) == 0) s.w2 = s.w1;

  // (6) update factor and coupling
  s.b += p.muB * sign(o.e) * (o.y1 - o.y2) * s.gamma * (1.0 - s.gamma);
  s.b = std::clamp(s.b, -p.bMax, p.bMax);
  s.gamma = logistic(s.b);

  s.prevE1 = o.e1;
  ++s.stepIndex;
  o.gamma = s.gamma;
  o.b = s.b;
  return o;
}

StepOutput lms_step(FilterState& state, double mu, const StepInput& in, Bias bias) {
  return filter_step(state, in, bias, [mu](double) { return mu; });
}

double svs_mu(double alpha, double beta, double e) {
  return beta * (logistic(std::min(alpha * std::abs(e), 700.0)) - 0.5);
}

StepOutput svs_step(FilterState& state, double alpha, double beta, const StepInput& in, Bias bias) {
  return filter_step(state, in, bias, [=](double e) { return svs_mu(alpha, beta, e); });
}

double atlms_mu(double alpha, double beta, double m, double nScale, double e) {
  return beta * (2.0 / kPi) * std::atan(alpha * e * e) * m / (m + nScale);
}

StepOutput atlms_step(FilterState& state, double alpha, double beta, double m, double nScale,
                      const StepInput& in, Bias bias) {
  return filter_step(state, in, bias, [=](double e) { return atlms_mu(alpha, beta, m, nScale, e); });
}

double lambda_max(const std::vector<double>& r, std::size_t m, double tol, int* iterations) {
  std::vector<double> v(m, 1.0 / std::sqrt(static_cast<double>(m))), w(m);
  double lambda = 0.0;
  int it = 0;
  for (; it < 1000000; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += r[i * m + j] * v[j];
      w[i] = s;
    }
    const double next = dot(v, w);  // Rayleigh quotient, v has unit norm
    const double nrm = std::sqrt(dot(w, w));
    if (nrm == 0.0) {
      lambda = 0.0;
      break;
    }
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / nrm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  if (iterations) *iterations = it + 1;
  return lambda;
}

ConditionReport check_convergence_condition(const ConvexParams& params,
                                            const std::vector<std::vector<double>>& xSamples) {
  if (xSamples.empty()) throw InsufficientSamples("no input samples");
  const std::size_t m = xSamples.front().size();
  if (m == 0 || xSamples.size() < m)
    throw InsufficientSamples("need at least as many samples as the filter order");

  std::vector<double> r(m * m, 0.0);
  double minPower = std::numeric_limits<double>::infinity();
  for (const auto& x : xSamples) {
    if (x.size() != m) throw DimensionMismatch("input samples differ in length");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) r[i * m + j] += x[i] * x[j];
    minPower = std::min(minPower, dot(x, x));
  }
  for (double& v : r) v /= static_cast<double>(xSamples.size());

  ConditionReport rep;
  rep.lambdaMax = lambda_max(r, m, 1e-10, &rep.powerIterations);
  rep.limit = rep.lambdaMax > 0.0 ? 2.0 / rep.lambdaMax : std::numeric_limits<double>::infinity();
  rep.minPower = minPower;
  const double denom = params.phi + minPower;
  rep.nlmsBound = denom > 0.0 ? params.beta / denom : std::numeric_limits<double>::infinity();
  rep.betaPositive = params.beta > 0.0;
  rep.nlmsOk = rep.nlmsBound <= rep.limit;
  rep.cOk = params.c < rep.limit;
  return rep;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Lms: return "lms";
    case Method::Svs: return "svs";
    case Method::Atlms: return "atlms";
    case Method::Convex: return "convex";
  }
  return "lms";
}

Method parse_method(const std::string& name) {
  if (name == "lms") return Method::Lms;
  if (name == "svs") return Method::Svs;
  if (name == "atlms") return Method::Atlms;
  if (name == "convex") return Method::Convex;
  throw std::invalid_argument("unknown method '" + name + "' (expected lms, svs, atlms or convex)");
}

Controller::Controller(Method method, const MethodParams& params, std::vector<double> w0)
    : method_(method), params_(params) {
  if (w0.empty()) throw DimensionMismatch("controller needs at least one weight");
  if (method_ == Method::Convex) {
    validate(params_.convex);
    convex_ = ConvexState::init(std::move(w0));
  } else {
    filter_.w = std::move(w0);
  }
}

StepOutput Controller::step(std::span<const double> x, double d) {
  const StepInput in{x, d};
  switch (method_) {
    case Method::Lms: return lms_step(filter_, params_.lms.mu, in, params_.bias);
    case Method::Svs: return svs_step(filter_, params_.svs.alpha, params_.svs.beta, in, params_.bias);
    case Method::Atlms:
      return atlms_step(filter_, params_.atlms.alpha, params_.atlms.beta, params_.atlms.m, params_.atlms.nScale, in,
                        params_.bias);
    case Method::Convex: return convex_step(convex_, params_.convex, in);
  }
  return {};
}

std::vector<double> Controller::effective_weights() const {
  if (method_ != Method::Convex) return filter_.w;
  std::vector<double> w(convex_.w1.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = convex_.gamma * convex_.w1[i] + (1.0 - convex_.gamma) * convex_.w2[i];
  return w;
}

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
  std::string out = "n,y,y1,y2,e,e1,e2,gamma,b,mu1\n";
  for (const auto& r : rows) {
    csv::append(out, static_cast<std::int64_t>(r.n));
    const double vals[] = {r.out.y, r.out.y1, r.out.y2, r.out.e, r.out.e1, r.out.e2, r.out.gamma, r.out.b, r.out.mu1};
    for (double v : vals) {
      out.push_back(',');
      csv::append(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace hilsim::control
