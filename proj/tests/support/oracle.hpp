#pragma once

// Brute-force reference: midpoint-rule line integral of dB = mu0 N I dl x r / (4 pi |r|^3)
// along every straight filament. Independent of the closed-form kernels.

#include <cmath>

#include "hilsim/magnetics.hpp"

namespace oracle {

inline hilsim::magnetics::FieldVector segment(const hilsim::magnetics::Segment& s,
                                              const hilsim::magnetics::Point& q, long subdivisions) {
  const double pi = 3.14159265358979323846;
  const double dx = (s.end.x - s.start.x) / static_cast<double>(subdivisions);
  const double dy = (s.end.y - s.start.y) / static_cast<double>(subdivisions);
  const double dz = (s.end.z - s.start.z) / static_cast<double>(subdivisions);
  long double bx = 0, by = 0, bz = 0;
  for (long i = 0; i < subdivisions; ++i) {
    const double t = (static_cast<double>(i) + 0.5);
    const double rx = q.x - (s.start.x + t * dx);
    const double ry = q.y - (s.start.y + t * dy);
    const double rz = q.z - (s.start.z + t * dz);
    const double r2 = rx * rx + ry * ry + rz * rz;
    const double inv = 1.0 / (r2 * std::sqrt(r2));
    bx += (dy * rz - dz * ry) * inv;
    by += (dz * rx - dx * rz) * inv;
    bz += (dx * ry - dy * rx) * inv;
  }
  const double k = hilsim::magnetics::kMu0 * s.current * s.turns / (4.0 * pi);
  return {k * static_cast<double>(bx), k * static_cast<double>(by), k * static_cast<double>(bz)};
}

inline hilsim::magnetics::FieldVector pair(const hilsim::magnetics::HelmholtzPair& p,
                                           const hilsim::magnetics::Point& q, long subdivisions = 1000000) {
  hilsim::magnetics::FieldVector b;
  for (const auto& loop : {p.upper(), p.lower()})
    for (const auto& s : hilsim::magnetics::loop_segments(loop)) b += segment(s, q, subdivisions);
  return b;
}

}  // namespace oracle
