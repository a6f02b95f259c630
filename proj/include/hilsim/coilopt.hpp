#pragma once

#include <stdexcept>

#include "hilsim/magnetics.hpp"

namespace hilsim::coilopt {

/// Side-to-spacing ratio n (side = n * spacing) that nulls the axial curvature at the centre.
struct OptimalityResult {
  double n = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Half-extents of the region on the z = 0 plane whose uniformity stays within threshold.
struct UniformRegion {
  double threshold = 0.0;  ///< percent
  double extentXoverD = 0.0;
  double extentYoverD = 0.0;
};

class NoBracket : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// -5 n^6 + 11 n^4 + 18 n^2 + 6
double optimality_polynomial(double n);

/// Bisection for the positive root of optimality_polynomial on [lo, hi].
OptimalityResult solve_optimal_ratio(double lo = 1.0, double hi = 3.0);

/// Closed-form d^2 bz / dz^2 at the centre of the pair, tesla per square metre.
double second_derivative_center(const magnetics::HelmholtzPair& pair);

/// Central finite difference of onaxis_field with step 1e-4 * spacing.
double second_derivative_center_fd(const magnetics::HelmholtzPair& pair);

/// Optimal coil spacing for a given side length.
double optimal_spacing(double sideL);

/// Scans outward along +x and +y in `resolution` steps. Defaults to 1 mm.
UniformRegion uniform_region(const magnetics::HelmholtzPair& pair, double thresholdPct,
                             double resolution = 1e-3);

}  // namespace hilsim::coilopt
