#include "hilsim/magnetics.hpp"

#include <cmath>
#include <sstream>

#include "hilsim/csv.hpp"
#include "hilsim/field_kernels.hpp"
#include "magnetics/segment_math.hpp"

namespace hilsim::magnetics {

namespace {

std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "point (" << p.x << ", " << p.y << ", " << p.z << ") lies on a coil wire";
  return os.str();
}

bool finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void require_finite(const Point& q) {
  if (!finite(q)) throw InvalidGeometry("query point has non-finite coordinates");
}

// Axial field of one square loop of half-side h at axial offset c from its plane.
double loop_axial(double prefactor, double h, double c) {
  const double h2 = h * h;
  const double c2 = c * c;
  return prefactor * h2 / ((h2 + c2) * std::sqrt(2.0 * h2 + c2));
}

}  // namespace

double FieldVector::norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }

PointOnWire::PointOnWire(const Point& p) : std::domain_error(describe(p)), point_(p) {}

void validate(const Segment& seg) {
  if (!finite(seg.start) || !finite(seg.end) || !std::isfinite(seg.current))
    throw InvalidGeometry("segment has non-finite coordinates or current");
  if (seg.turns < 1) throw InvalidGeometry("segment turns must be >= 1");
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  const double dz = seg.end.z - seg.start.z;
  if (dx == 0.0 && dy == 0.0 && dz == 0.0) throw InvalidGeometry("segment start equals end");
}

void validate(const SquareLoop& loop) {
  if (!(loop.side > 0.0) || !std::isfinite(loop.side)) throw InvalidGeometry("loop side must be > 0");
  if (!std::isfinite(loop.zOffset) || !std::isfinite(loop.current))
    throw InvalidGeometry("loop offset and current must be finite");
  if (loop.turns < 1) throw InvalidGeometry("loop turns must be >= 1");
}

void validate(const HelmholtzPair& pair) {
  if (!(pair.side > 0.0) || !std::isfinite(pair.side)) throw InvalidGeometry("pair side must be > 0");
  if (!(pair.spacing > 0.0) || !std::isfinite(pair.spacing))
    throw InvalidGeometry("pair spacing must be > 0");
  if (!std::isfinite(pair.current)) throw InvalidGeometry("pair current must be finite");
  if (pair.turns < 1) throw InvalidGeometry("pair turns must be >= 1");
}

FieldVector segment_field(const Segment& seg, const Point& q) {
  validate(seg);
  require_finite(q);
  const auto g = kernels::detail::make_geom(seg);
  FieldVector b;
  if (!kernels::detail::accumulate_segment(g, q.x, q.y, q.z, b.bx, b.by, b.bz)) throw PointOnWire(q);
  return b;
}

std::vector<Segment> loop_segments(const SquareLoop& loop) {
  validate(loop);
  const double h = 0.5 * loop.side;
  const double z = loop.zOffset;
  const Point c0{+h, -h, z}, c1{+h, +h, z}, c2{-h, +h, z}, c3{-h, -h, z};
  return {
      {c0, c1, loop.current, loop.turns},
      {c1, c2, loop.current, loop.turns},
      {c2, c3, loop.current, loop.turns},
      {c3, c0, loop.current, loop.turns},
  };
}

FieldVector square_loop_field(const SquareLoop& loop, const Point& q) {
  require_finite(q);
  FieldVector b;
  for (const auto& seg : loop_segments(loop)) {
    const auto g = kernels::detail::make_geom(seg);
    if (!kernels::detail::accumulate_segment(g, q.x, q.y, q.z, b.bx, b.by, b.bz))
      throw PointOnWire(q);
  }
  return b;
}

FieldVector pair_field(const HelmholtzPair& pair, const Point& q) {
  validate(pair);
  return square_loop_field(pair.upper(), q) + square_loop_field(pair.lower(), q);
}

double onaxis_field(const HelmholtzPair& pair, double z) {
  validate(pair);
  const double prefactor = 2.0 * pair.turns * kMu0 * pair.current / 3.14159265358979323846;
  const double h = 0.5 * pair.side;
  const double halfGap = 0.5 * pair.spacing;
  return loop_axial(prefactor, h, z - halfGap) + loop_axial(prefactor, h, z + halfGap);
}

double uniformity(const HelmholtzPair& pair, const Point& q, UniformityMode mode) {
  const FieldVector centre = pair_field(pair, {0.0, 0.0, 0.0});
  const FieldVector here = pair_field(pair, q);
  const double ref = mode == UniformityMode::ZComponent ? std::abs(centre.bz) : centre.norm();
  if (ref < 1e-15) throw ZeroCenterField();
  const double val = mode == UniformityMode::ZComponent ? std::abs(here.bz) : here.norm();
  return 100.0 * (val - ref) / ref;
}

Point GridSpec::at(std::size_t ix, std::size_t iy, std::size_t iz) const {
  auto lerp = [](double lo, double hi, std::size_t i, std::size_t n) {
    if (n <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  return {lerp(xMin, xMax, ix, nx), lerp(yMin, yMax, iy, ny), lerp(zMin, zMax, iz, nz)};
}

std::vector<Point> GridSpec::points() const {
  std::vector<Point> pts;
  pts.reserve(size());
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t iz = 0; iz < nz; ++iz) pts.push_back(at(ix, iy, iz));
  return pts;
}

std::vector<FieldSample> field_map(const HelmholtzPair& pair, const GridSpec& grid,
                                   UniformityMode mode) {
  validate(pair);
  if (grid.nx == 0 || grid.ny == 0 || grid.nz == 0)
    throw InvalidGeometry("grid counts must be >= 1");
  const auto pts = grid.points();
  const std::size_t n = pts.size();

  std::vector<double> xs(n), ys(n), zs(n), bx(n), by(n), bz(n);
  for (std::size_t i = 0; i < n; ++i) {
    require_finite(pts[i]);
    xs[i] = pts[i].x;
    ys[i] = pts[i].y;
    zs[i] = pts[i].z;
  }
  const auto isa = kernels::detect_isa();
  const std::size_t hit = kernels::pair_field_batch(pair, {xs, ys, zs}, {bx, by, bz}, isa);
  if (hit != kernels::kNoWireHit) throw PointOnWire(pts[hit]);

  // centre through the same kernel so the origin row is exactly zero
  FieldVector centre;
  const double zero[1] = {0.0};
  kernels::pair_field_batch(pair, {zero, zero, zero},
                            {{&centre.bx, 1}, {&centre.by, 1}, {&centre.bz, 1}}, isa);
  const double ref = mode == UniformityMode::ZComponent ? std::abs(centre.bz) : centre.norm();
  if (ref < 1e-15) throw ZeroCenterField();

  std::vector<FieldSample> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FieldVector b{bx[i], by[i], bz[i]};
    const double val = mode == UniformityMode::ZComponent ? std::abs(b.bz) : b.norm();
    rows.push_back({pts[i], b, 100.0 * (val - ref) / ref});
  }
  return rows;
}

std::string field_map_csv(const std::vector<FieldSample>& rows) {
  std::string out = "x_m,y_m,z_m,bx_T,by_T,bz_T,uniformity_pct\n";
  for (const auto& r : rows) {
    const double vals[] = {r.point.x, r.point.y, r.point.z, r.field.bx,
                           r.field.by, r.field.bz, r.uniformityPct};
    for (std::size_t i = 0; i < 7; ++i) {
      if (i) out.push_back(',');
      csv::append(out, vals[i]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace hilsim::magnetics
