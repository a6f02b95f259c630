#include "hilsim/coilopt.hpp"

#include <cmath>

namespace hilsim::coilopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// |uniformity| along one in-plane axis, measured against a centre reference computed once.
double axis_extent(const magnetics::HelmholtzPair& pair, double ref, bool alongX, double thresholdPct,
                   double resolution) {
  // stop well short of the wire plane corners; the region never gets close to them
  const double limit = 0.5 * pair.side;
  double extent = 0.0;
  for (long k = 1;; ++k) {
    const double s = static_cast<double>(k) * resolution;
    if (s >= limit) break;
    const magnetics::Point q = alongX ? magnetics::Point{s, 0.0, 0.0} : magnetics::Point{0.0, s, 0.0};
    const double h = 100.0 * (std::abs(magnetics::pair_field(pair, q).bz) - ref) / ref;
    if (std::abs(h) > thresholdPct) break;
    extent = s;
  }
  return extent / pair.spacing;
}

}  // namespace

double optimality_polynomial(double n) {
  const double n2 = n * n;
  return -5.0 * n2 * n2 * n2 + 11.0 * n2 * n2 + 18.0 * n2 + 6.0;
}

OptimalityResult solve_optimal_ratio(double lo, double hi) {
  double flo = optimality_polynomial(lo);
  const double fhi = optimality_polynomial(hi);
  if (!(lo < hi) || flo * fhi > 0.0)
    throw NoBracket("optimality polynomial does not change sign on the bracket");

  OptimalityResult r{lo, flo, 0};
  if (flo == 0.0) return r;
  if (fhi == 0.0) return {hi, fhi, 0};
  // halve until the residual is small or the bracket can no longer shrink
  while (r.iterations < 2000) {
    const double mid = 0.5 * (lo + hi);
    ++r.iterations;
    if (mid <= lo || mid >= hi) break;
    const double fm = optimality_polynomial(mid);
    r.n = mid;
    r.residual = fm;
    if (std::abs(fm) < 1e-12 && hi - lo < 1e-12) break;
    if (fm == 0.0) break;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return r;
}

double second_derivative_center(const magnetics::HelmholtzPair& pair) {
  magnetics::validate(pair);
  const double d = pair.spacing;
  const double n = pair.side / d;
  const double n2 = n * n;
  const double n4 = n2 * n2;
  const double n6 = n4 * n2;
  const double n8 = n4 * n4;
  const double n10 = n8 * n2;
  const double num = 64.0 * pair.current * pair.turns * magnetics::kMu0 * n2 * optimality_polynomial(n);
  const double den = kPi * d * d * std::sqrt(d * d * (2.0 * n2 + 1.0)) *
                     (4.0 * n10 + 16.0 * n8 + 25.0 * n6 + 19.0 * n4 + 7.0 * n2 + 1.0);
  return num / den;
}

double second_derivative_center_fd(const magnetics::HelmholtzPair& pair) {
  const double h = 1e-4 * pair.spacing;
  const double f0 = magnetics::onaxis_field(pair, 0.0);
  const double fp = magnetics::onaxis_field(pair, h);
  const double fm = magnetics::onaxis_field(pair, -h);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

double optimal_spacing(double sideL) {
  if (!(sideL > 0.0) || !std::isfinite(sideL)) throw magnetics::InvalidGeometry("side length must be > 0");
  return sideL / solve_optimal_ratio().n;
}

UniformRegion uniform_region(const magnetics::HelmholtzPair& pair, double thresholdPct, double resolution) {
  magnetics::validate(pair);
  if (!(thresholdPct > 0.0)) throw std::invalid_argument("uniform_region: threshold must be > 0");
  if (!(resolution > 0.0)) throw std::invalid_argument("uniform_region: resolution must be > 0");
  const double ref = std::abs(magnetics::pair_field(pair, {0.0, 0.0, 0.0}).bz);
  if (ref < 1e-15) throw magnetics::ZeroCenterField();
  return {thresholdPct, axis_extent(pair, ref, true, thresholdPct, resolution),
          axis_extent(pair, ref, false, thresholdPct, resolution)};
}

}  // namespace hilsim::coilopt
