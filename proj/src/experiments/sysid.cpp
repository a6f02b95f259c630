#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "hilsim/experiments.hpp"

namespace hilsim::experiments {

namespace {

int worker_count(int requested, int jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, jobs));
}

// Runs fn(trial) for every trial, spread over threads. Results are written by index,
// so the caller's reduction order never depends on scheduling.
template <class Fn>
void for_each_trial(int trials, int threads, Fn fn) {
  const int workers = worker_count(threads, trials);
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next++; t < trials && !failed; t = next++) {
        try {
          fn(t);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double noise_sigma(const SysIdScenario& scn) {
  if (std::isinf(scn.snrDb) && scn.snrDb > 0) return 0.0;
  return plant::snr_to_sigma(1.0, scn.snrDb);
}

bool in_burst(const SysIdScenario& scn, long n) {
  return scn.reinjectionAt > 0 && n >= scn.reinjectionAt && n < scn.reinjectionAt + scn.reinjectionLength;
}

// Input and noise stream of one trial. Identical for every method.
struct TrialStream {
  static std::mt19937_64 seeds(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 rng;
  std::normal_distribution<double> unit{0.0, 1.0};
  std::vector<double> taps;
  double sigma;
  const SysIdScenario& scn;

  TrialStream(const SysIdScenario& s, int trial)
      : rng(seeds(s.seed, trial)), taps(s.order, 0.0), sigma(noise_sigma(s)), scn(s) {
    // fill the delay line so x(0) is already fully excited
    for (int i = 0; i < s.order; ++i) push();
  }

  void push() {
    std::rotate(taps.rbegin(), taps.rbegin() + 1, taps.rend());
    taps[0] = unit(rng);
  }

  // Advances to sample n and returns (d, eps).
  std::pair<double, double> next(long n) {
    if (n > 0) push();
    const double g = in_burst(scn, n) ? scn.reinjectionGain : 1.0;
    const double eps = sigma * g * unit(rng);
    double d = eps;
    for (int i = 0; i < scn.order; ++i) d += scn.trueWeights[i] * taps[i];
    return {d, eps};
  }
};

std::vector<double> initial_weights(const SysIdScenario& scn) {
  if (scn.initialWeights.empty()) return std::vector<double>(scn.order, 0.0);
  return scn.initialWeights;
}

}  // namespace

void validate(const SysIdScenario& scn) {
  if (scn.order < 1) throw std::invalid_argument("sysid: order must be >= 1");
  if (static_cast<int>(scn.trueWeights.size()) != scn.order)
    throw std::invalid_argument("sysid: true weights must have `order` entries");
  if (!scn.initialWeights.empty() && static_cast<int>(scn.initialWeights.size()) != scn.order)
    throw std::invalid_argument("sysid: initial weights must have `order` entries");
  if (scn.nIters < 2) throw std::invalid_argument("sysid: iterations must be >= 2");
  if (scn.reinjectionAt > 0 && scn.nIters <= scn.reinjectionAt)
    throw std::invalid_argument("sysid: iterations must exceed the reinjection point");
  if (scn.reinjectionLength < 0 || !(scn.reinjectionGain >= 0.0))
    throw std::invalid_argument("sysid: reinjection length and gain must be >= 0");
  if (scn.trials < 1) throw std::invalid_argument("sysid: trials must be >= 1");
  if (scn.smoothWindow < 1) throw std::invalid_argument("sysid: smoothing window must be >= 1");
  if (!(scn.tailFraction > 0.0 && scn.tailFraction <= 1.0))
    throw std::invalid_argument("sysid: tail fraction must be in (0,1]");
  if (std::isnan(scn.snrDb)) throw std::invalid_argument("sysid: snr is NaN");
}

std::vector<double> smooth(const std::vector<double>& v, int window) {
  const long n = static_cast<long>(v.size());
  const long back = window / 2, fwd = window - 1 - window / 2;
  std::vector<double> prefix(v.size() + 1, 0.0);
  for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  std::vector<double> out(v.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - back), hi = std::min(n - 1, i + fwd);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

void summarize_mse(MetricsReport& rep, const std::vector<double>& raw, const SysIdScenario& scn) {
  rep.mseCurve = smooth(raw, scn.smoothWindow);
  const auto& s = rep.mseCurve;
  const long n = static_cast<long>(s.size());
  const long tailLen = std::max<long>(1, static_cast<long>(std::floor(scn.tailFraction * static_cast<double>(n))));
  double tail = 0.0;
  for (long i = n - tailLen; i < n; ++i) tail += s[i];
  tail /= static_cast<double>(tailLen);
  rep.finalMse = tail;

  const double threshold = scn.convergeFactor * tail;
  rep.itersToConverge = -1;
  const long firstPhaseEnd = scn.reinjectionAt > 0 ? scn.reinjectionAt : n;
  for (long i = 0; i < firstPhaseEnd; ++i)
    if (s[i] <= threshold) {
      rep.itersToConverge = i;
      break;
    }

  rep.reconvergeIters = -1;
  rep.peakAfterBurst = 0.0;
  if (scn.reinjectionAt > 0 && scn.reinjectionLength > 0) {
    const long burstEnd = std::min(n, scn.reinjectionAt + scn.reinjectionLength);
    for (long i = scn.reinjectionAt; i < n; ++i) rep.peakAfterBurst = std::max(rep.peakAfterBurst, s[i]);
    // count from the end of the burst; the window still holds burst samples for a while
    for (long i = burstEnd; i < n; ++i)
      if (s[i] <= threshold) {
        rep.reconvergeIters = i - burstEnd;
        break;
      }
  }
}

std::vector<double> sysid_trial_errors(const SysIdScenario& scn, control::Method method,
                                       const control::MethodParams& params, int trial) {
  TrialStream stream(scn, trial);
  control::Controller ctl(method, params, initial_weights(scn));
  std::vector<double> e(scn.nIters);
  for (long n = 0; n < scn.nIters; ++n) {
    const auto [d, eps] = stream.next(n);
    e[n] = ctl.step(stream.taps, d).e;
  }
  return e;
}

MetricsReport run_sysid(const SysIdScenario& scn, control::Method method, const control::MethodParams& params) {
  validate(scn);
  std::vector<std::vector<double>> perTrial(scn.trials);
  for_each_trial(scn.trials, scn.threads, [&](int t) {
    auto e = sysid_trial_errors(scn, method, params, t);
    for (double& v : e) v *= v;
    perTrial[t] = std::move(e);
  });
  std::vector<double> mse(scn.nIters, 0.0);
  for (const auto& tr : perTrial)
    for (long n = 0; n < scn.nIters; ++n) mse[n] += tr[n];
  for (double& v : mse) v /= static_cast<double>(scn.trials);

  MetricsReport rep;
  summarize_mse(rep, mse, scn);
  return rep;
}

DivergenceReport run_divergence_probe(const SysIdScenario& base, control::Method method,
                                      const control::MethodParams& params) {
  SysIdScenario scn = base;
  scn.nIters = std::max<long>(scn.nIters, 501);
  scn.reinjectionAt = 0;
  const auto rep = run_sysid(scn, method, params);
  DivergenceReport out;
  out.mseEarly = rep.mseCurve[50];
  out.mseLate = rep.mseCurve[500];
  out.diverged = !std::isfinite(out.mseLate) || out.mseLate > 1e3 * out.mseEarly;
  return out;
}

StabilityReport run_stability_stat(const SysIdScenario& base, control::Method method,
                                   const control::MethodParams& params, long atIter) {
  SysIdScenario scn = base;
  scn.reinjectionAt = 0;
  validate(scn);
  if (atIter < 1 || atIter >= scn.nIters) throw std::invalid_argument("stability: atIter out of range");

  struct Sample {
    double e2, eps2, mis, lag, lagMis, cross, crossLag;
  };
  std::vector<Sample> samples(scn.trials);
  for_each_trial(scn.trials, scn.threads, [&](int t) {
    TrialStream stream(scn, t);
    control::Controller ctl(method, params, initial_weights(scn));
    double prevE = 0.0, prevM = 0.0;
    for (long n = 0; n <= atIter; ++n) {
      const auto [d, eps] = stream.next(n);
      const auto w = ctl.effective_weights();
      double m = 0.0;  // (wo - w)' x
      for (int i = 0; i < scn.order; ++i) m += (scn.trueWeights[i] - w[i]) * stream.taps[i];
      const double e = ctl.step(stream.taps, d).e;
      if (n == atIter) {
        samples[t] = {e * e, eps * eps, m * m, e * prevE, m * prevM, e * e - eps * eps - m * m,
                      e * prevE - m * prevM};
      }
      prevE = e;
      prevM = m;
    }
  });

  auto mean_se = [&](auto field) {
    double s = 0.0, s2 = 0.0;
    for (const auto& x : samples) {
      const double v = field(x);
      s += v;
      s2 += v * v;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return std::pair<double, double>{mean, std::sqrt(var / n)};
  };

  StabilityReport r;
  r.atIter = atIter;
  r.trials = scn.trials;
  std::tie(r.meanE2, r.seE2) = mean_se([](const Sample& s) { return s.e2; });
  std::tie(r.meanEps2, r.seEps2) = mean_se([](const Sample& s) { return s.eps2; });
  std::tie(r.mismatch, r.seMismatch) = mean_se([](const Sample& s) { return s.mis; });
  std::tie(r.lag1, r.seLag1) = mean_se([](const Sample& s) { return s.lag; });
  std::tie(r.lag1Mismatch, r.seLag1Mismatch) = mean_se([](const Sample& s) { return s.lagMis; });
  r.predictedE2 = r.meanEps2 + r.mismatch;
  const auto [crossMean, crossSe] = mean_se([](const Sample& s) { return s.cross; });
  const auto [crossLagMean, crossLagSe] = mean_se([](const Sample& s) { return s.crossLag; });
  // paired differences: the cross terms with the noise are what must vanish
  r.e2AboveNoise = r.meanE2 >= r.meanEps2 - 3.0 * r.seEps2;
  // the small absolute slack covers rounding when the noise is exactly zero
  const double slack = 1e-12 * std::max(r.meanE2, 1e-300);
  r.e2MatchesPrediction = std::abs(crossMean) <= 3.0 * crossSe + slack;
  r.lag1MatchesMismatch = std::abs(crossLagMean) <= 3.0 * crossLagSe + slack;
  return r;
}

}  // namespace hilsim::experiments
