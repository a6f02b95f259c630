// Compiled with -mavx2 (no FMA so that rounding matches the scalar kernel).

#include <immintrin.h>

#include <array>

#include "hilsim/field_kernels.hpp"
#include "magnetics/segment_math.hpp"

namespace hilsim::kernels::detail {

namespace {

struct SegmentLanes {
  __m256d ax, ay, az, ux, uy, uz, length, prefactor;
};

SegmentLanes broadcast(const SegmentGeom& g) {
  return {_mm256_set1_pd(g.ax), _mm256_set1_pd(g.ay), _mm256_set1_pd(g.az),
          _mm256_set1_pd(g.ux), _mm256_set1_pd(g.uy), _mm256_set1_pd(g.uz),
          _mm256_set1_pd(g.length), _mm256_set1_pd(g.prefactor)};
}

// Same operation order as accumulate_segment. Returns the lane mask of points
// that are clear of the wire.
int accumulate4(const SegmentLanes& g, __m256d px, __m256d py, __m256d pz, __m256d& bx,
                __m256d& by, __m256d& bz) {
  const __m256d dx = _mm256_sub_pd(px, g.ax);
  const __m256d dy = _mm256_sub_pd(py, g.ay);
  const __m256d dz = _mm256_sub_pd(pz, g.az);
  const __m256d t = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, g.ux), _mm256_mul_pd(dy, g.uy)),
                                  _mm256_mul_pd(dz, g.uz));
  const __m256d rx = _mm256_sub_pd(dx, _mm256_mul_pd(t, g.ux));
  const __m256d ry = _mm256_sub_pd(dy, _mm256_mul_pd(t, g.uy));
  const __m256d rz = _mm256_sub_pd(dz, _mm256_mul_pd(t, g.uz));
  const __m256d a2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(rx, rx), _mm256_mul_pd(ry, ry)),
                                   _mm256_mul_pd(rz, rz));
  const __m256d guard = _mm256_set1_pd(magnetics::kWireGuard * magnetics::kWireGuard);
  const int clear = _mm256_movemask_pd(_mm256_cmp_pd(a2, guard, _CMP_GT_OQ));

  const __m256d dd = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                   _mm256_mul_pd(dz, dz));
  const __m256d lt = _mm256_sub_pd(g.length, t);
  const __m256d r1 = _mm256_sqrt_pd(dd);
  const __m256d r2 = _mm256_sqrt_pd(_mm256_add_pd(a2, _mm256_mul_pd(lt, lt)));
  const __m256d cosSum = _mm256_add_pd(_mm256_div_pd(t, r1), _mm256_div_pd(lt, r2));
  const __m256d k = _mm256_div_pd(_mm256_mul_pd(g.prefactor, cosSum), a2);

  bx = _mm256_add_pd(bx, _mm256_mul_pd(k, _mm256_sub_pd(_mm256_mul_pd(g.uy, dz), _mm256_mul_pd(g.uz, dy))));
  by = _mm256_add_pd(by, _mm256_mul_pd(k, _mm256_sub_pd(_mm256_mul_pd(g.uz, dx), _mm256_mul_pd(g.ux, dz))));
  bz = _mm256_add_pd(bz, _mm256_mul_pd(k, _mm256_sub_pd(_mm256_mul_pd(g.ux, dy), _mm256_mul_pd(g.uy, dx))));
  return clear;
}

}  // namespace

std::size_t pair_field_avx2(const magnetics::HelmholtzPair& pair, PointBlock pts, FieldBlock out) {
  std::array<SegmentGeom, 8> geoms{};
  {
    std::size_t k = 0;
    for (const auto& loop : {pair.upper(), pair.lower()})
      for (const auto& seg : magnetics::loop_segments(loop)) geoms[k++] = make_geom(seg);
  }
  std::array<SegmentLanes, 8> lanes{};
  for (std::size_t s = 0; s < 8; ++s) lanes[s] = broadcast(geoms[s]);

  const std::size_t n = pts.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(pts.x.data() + i);
    const __m256d py = _mm256_loadu_pd(pts.y.data() + i);
    const __m256d pz = _mm256_loadu_pd(pts.z.data() + i);
    __m256d lx = _mm256_setzero_pd(), ly = _mm256_setzero_pd(), lz = _mm256_setzero_pd();
    __m256d mx = _mm256_setzero_pd(), my = _mm256_setzero_pd(), mz = _mm256_setzero_pd();
    int clear = 0xF;
    for (std::size_t s = 0; s < 4; ++s) clear &= accumulate4(lanes[s], px, py, pz, lx, ly, lz);
    for (std::size_t s = 4; s < 8; ++s) clear &= accumulate4(lanes[s], px, py, pz, mx, my, mz);
    if (clear != 0xF) {
      for (std::size_t lane = 0; lane < 4; ++lane)
        if (!(clear & (1 << lane))) return i + lane;
    }
    _mm256_storeu_pd(out.bx.data() + i, _mm256_add_pd(lx, mx));
    _mm256_storeu_pd(out.by.data() + i, _mm256_add_pd(ly, my));
    _mm256_storeu_pd(out.bz.data() + i, _mm256_add_pd(lz, mz));
  }
  if (i < n) {
    const PointBlock rest{pts.x.subspan(i), pts.y.subspan(i), pts.z.subspan(i)};
    const FieldBlock restOut{out.bx.subspan(i), out.by.subspan(i), out.bz.subspan(i)};
    const std::size_t hit = pair_field_scalar(pair, rest, restOut);
    if (hit != kNoWireHit) return i + hit;
  }
  return kNoWireHit;
}

}  // namespace hilsim::kernels::detail
