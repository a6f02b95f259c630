#include <gtest/gtest.h>

#include <cmath>

#include "hilsim/coilopt.hpp"

using namespace hilsim;

TEST(Coilopt, Polynomial) {
  EXPECT_EQ(coilopt::optimality_polynomial(0.0), 6.0);
  EXPECT_LT(std::abs(coilopt::optimality_polynomial(1.8365)), 0.05);
  EXPECT_GT(coilopt::optimality_polynomial(1.8), 0.0);
  EXPECT_LT(coilopt::optimality_polynomial(1.9), 0.0);
}

TEST(Coilopt, OptimalRatio) {
  const auto r = coilopt::solve_optimal_ratio();
  EXPECT_NEAR(r.n, 1.8365, 1e-3);
  EXPECT_LT(std::abs(r.residual), 1e-12);
  EXPECT_GT(r.iterations, 0);
  EXPECT_THROW(coilopt::solve_optimal_ratio(2.0, 3.0), coilopt::NoBracket);
}

TEST(Coilopt, SpacingTable2) {
  EXPECT_NEAR(coilopt::optimal_spacing(0.8404) * 1e3, 457.6, 0.5);
  EXPECT_NEAR(coilopt::optimal_spacing(1.0) * 1e3, 544.5, 0.1);
  EXPECT_THROW(coilopt::optimal_spacing(0.0), magnetics::InvalidGeometry);
}

TEST(Coilopt, SecondDerivativeClosedFormAgreesWithFiniteDifference) {
  for (double n : {1.2, 1.5, 2.4}) {
    const magnetics::HelmholtzPair p{n * 0.5, 0.5, 24, 2.94};
    const double a = coilopt::second_derivative_center(p);
    const double fd = coilopt::second_derivative_center_fd(p);
    EXPECT_LT(std::abs(a - fd), 1e-5 * std::abs(a)) << n;
  }
  magnetics::HelmholtzPair opt{0.8404, coilopt::optimal_spacing(0.8404), 24, 2.94};
  const double curv = coilopt::second_derivative_center(opt);
  const double ref = coilopt::second_derivative_center({0.8404, 0.4, 24, 2.94});
  EXPECT_LT(std::abs(curv), 1e-9 * std::abs(ref));
}

TEST(Coilopt, UniformRegionMonotone) {
  const magnetics::HelmholtzPair p{0.8404, 0.4576, 24, 2.94};
  double prevX = 0, prevY = 0;
  for (double thr : {0.1, 0.5, 1.0, 5.0, 10.0, 20.0}) {
    const auto r = coilopt::uniform_region(p, thr);
    EXPECT_GE(r.extentXoverD, prevX);
    EXPECT_GE(r.extentYoverD, prevY);
    prevX = r.extentXoverD;
    prevY = r.extentYoverD;
  }
  const auto five = coilopt::uniform_region(p, 5.0);
  EXPECT_NEAR(five.extentXoverD, 0.515, 0.0515);
  EXPECT_DOUBLE_EQ(five.extentXoverD, five.extentYoverD);  // square symmetry
}
