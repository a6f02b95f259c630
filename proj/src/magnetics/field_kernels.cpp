#include "hilsim/field_kernels.hpp"

#include <array>
#include <cmath>

#include "magnetics/segment_math.hpp"

namespace hilsim::kernels {

namespace detail {

SegmentGeom make_geom(const magnetics::Segment& seg) {
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  const double dz = seg.end.z - seg.start.z;
  const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
  return {seg.start.x, seg.start.y, seg.start.z,
          dx / len,    dy / len,    dz / len,
          len,         seg.turns * magnetics::kMu0 * seg.current / (4.0 * 3.14159265358979323846)};
}

std::size_t pair_field_scalar(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out) {
  std::array<SegmentGeom, 8> geoms{};
  {
    std::size_t k = 0;
    for (const auto& loop : {pair.upper(), pair.lower()})
      for (const auto& seg : magnetics::loop_segments(loop)) geoms[k++] = make_geom(seg);
  }
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lx = 0, ly = 0, lz = 0;  // upper loop
    double mx = 0, my = 0, mz = 0;  // lower loop
    bool ok = true;
    for (std::size_t s = 0; s < 4; ++s)
      ok &= accumulate_segment(geoms[s], pts.x[i], pts.y[i], pts.z[i], lx, ly, lz);
    for (std::size_t s = 4; s < 8; ++s)
      ok &= accumulate_segment(geoms[s], pts.x[i], pts.y[i], pts.z[i], mx, my, mz);
    if (!ok) return i;
    out.bx[i] = lx + mx;
    out.by[i] = ly + my;
    out.bz[i] = lz + mz;
  }
  return kNoWireHit;
}

}  // namespace detail

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(HILSIM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  static const Isa best = isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  return best;
}

std::size_t pair_field_batch(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out,
                             Isa isa) {
  magnetics::validate(pair);
  if (pts.y.size() != pts.size() || pts.z.size() != pts.size() || out.bx.size() < pts.size() ||
      out.by.size() < pts.size() || out.bz.size() < pts.size())
    throw std::invalid_argument("pair_field_batch: mismatched block sizes");
  if (!isa_available(isa)) isa = Isa::Scalar;
#if defined(HILSIM_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::pair_field_avx2(pair, pts, out);
#endif
  return detail::pair_field_scalar(pair, pts, out);
}

}  // namespace hilsim::kernels
