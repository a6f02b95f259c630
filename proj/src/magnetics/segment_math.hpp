#pragma once

// Shared scalar core of the finite-filament field. Both the per-point API and the
// scalar batch kernel use this so that they agree bit for bit.

#include <cmath>

#include "hilsim/field_kernels.hpp"

namespace hilsim::kernels::detail {

/// Adds the field of `g` at (px,py,pz) into (bx,by,bz). Returns false when the point
/// is within the wire guard of the filament's line.
inline bool accumulate_segment(const SegmentGeom& g, double px, double py, double pz, double& bx,
                               double& by, double& bz) {
  const double dx = px - g.ax;
  const double dy = py - g.ay;
  const double dz = pz - g.az;
  const double t = dx * g.ux + dy * g.uy + dz * g.uz;
  const double rx = dx - t * g.ux;
  const double ry = dy - t * g.uy;
  const double rz = dz - t * g.uz;
  const double a2 = rx * rx + ry * ry + rz * rz;
  if (!(a2 > magnetics::kWireGuard * magnetics::kWireGuard)) return false;

  const double dd = dx * dx + dy * dy + dz * dz;
  const double lt = g.length - t;
  const double r1 = std::sqrt(dd);
  const double r2 = std::sqrt(a2 + lt * lt);
  // cos(theta1) + cos(theta2) measured from each end of the filament
  const double cosSum = t / r1 + lt / r2;
  const double k = g.prefactor * cosSum / a2;

  // u x d == u x r_perp
  bx += k * (g.uy * dz - g.uz * dy);
  by += k * (g.uz * dx - g.ux * dz);
  bz += k * (g.ux * dy - g.uy * dx);
  return true;
}

}  // namespace hilsim::kernels::detail
