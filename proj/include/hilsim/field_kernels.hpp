#pragma once

// Batched Helmholtz-pair field evaluation over structure-of-arrays point sets.
// The scalar kernel is the reference; vector kernels must reproduce it to
// rounding and are selected at runtime from what the CPU reports.

#include <cstddef>
#include <limits>
#include <span>

#include "hilsim/magnetics.hpp"

namespace hilsim::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

/// Best kernel this build and this CPU can run.
Isa detect_isa();

/// True when the kernel for `isa` is compiled in and the CPU supports it.
bool isa_available(Isa isa);

inline constexpr std::size_t kNoWireHit = std::numeric_limits<std::size_t>::max();

struct PointBlock {
  std::span<const double> x, y, z;
  std::size_t size() const { return x.size(); }
};

struct FieldBlock {
  std::span<double> bx, by, bz;
};

/// Fills `out` with the pair field at every point. Returns the index of the first
/// point lying on a wire (in which case `out` is unspecified), or kNoWireHit.
std::size_t pair_field_batch(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out,
                             Isa isa);

inline std::size_t pair_field_batch(const magnetics::HelmholtzPair& pair, PointBlock pts,
                                    FieldBlock out) {
  return pair_field_batch(pair, pts, out, detect_isa());
}

namespace detail {

/// Filament data precomputed once per batch: origin, unit direction, length, prefactor.
struct SegmentGeom {
  double ax, ay, az;
  double ux, uy, uz;
  double length;
  double prefactor;  // N·mu0·I / (4·pi)
};

SegmentGeom make_geom(const magnetics::Segment& seg);

std::size_t pair_field_scalar(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out);
#if defined(HILSIM_HAVE_AVX2)
std::size_t pair_field_avx2(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out);
#endif

}  // namespace detail
}  // namespace hilsim::kernels
