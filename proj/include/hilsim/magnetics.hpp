#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilsim::magnetics {

/// Permeability of free space, T·m/A.
inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;

/// Perpendicular distance below which a query point counts as lying on a wire.
inline constexpr double kWireGuard = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Magnetic flux density in tesla.
struct FieldVector {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  FieldVector& operator+=(const FieldVector& o) {
    bx += o.bx;
    by += o.by;
    bz += o.bz;
    return *this;
  }
  friend FieldVector operator+(FieldVector a, const FieldVector& b) { return a += b; }
  friend FieldVector operator*(double k, const FieldVector& v) {
    return {k * v.bx, k * v.by, k * v.bz};
  }
  double norm() const;
};

/// Straight filament carrying `current` from `start` to `end`, `turns` coincident copies.
struct Segment {
  Point start;
  Point end;
  double current = 0.0;
  int turns = 1;
};

/// Square loop in the plane z = zOffset, centred on the z axis, sides parallel to x/y.
/// Positive current circulates counter-clockwise seen from +z (field along +z at the centre).
struct SquareLoop {
  double side = 0.0;
  double zOffset = 0.0;
  double current = 0.0;
  int turns = 1;
};

/// Two identical square loops at z = ±spacing/2, series aiding.
struct HelmholtzPair {
  double side = 0.0;
  double spacing = 0.0;
  int turns = 1;
  double current = 0.0;

  SquareLoop upper() const { return {side, +0.5 * spacing, current, turns}; }
  SquareLoop lower() const { return {side, -0.5 * spacing, current, turns}; }
};

class PointOnWire : public std::domain_error {
 public:
  explicit PointOnWire(const Point& p);
  const Point& point() const { return point_; }

 private:
  Point point_;
};

class ZeroCenterField : public std::domain_error {
 public:
  ZeroCenterField() : std::domain_error("field at the coil centre is zero; uniformity undefined") {}
};

class InvalidGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const Segment& seg);
void validate(const SquareLoop& loop);
void validate(const HelmholtzPair& pair);

/// Closed-form field of a finite straight filament.
FieldVector segment_field(const Segment& seg, const Point& q);

/// The four filaments of a square loop in traversal order.
std::vector<Segment> loop_segments(const SquareLoop& loop);

FieldVector square_loop_field(const SquareLoop& loop, const Point& q);

FieldVector pair_field(const HelmholtzPair& pair, const Point& q);

/// Axial field bz(0,0,z) of the pair from the on-axis closed form.
double onaxis_field(const HelmholtzPair& pair, double z);

enum class UniformityMode {
  ZComponent,  ///< |bz(q)| against |bz(0)|; the default
  FullVector,  ///< |B(q)| against |B(0)|
};

/// Percent deviation of the field at q from the field at the origin.
double uniformity(const HelmholtzPair& pair, const Point& q,
                  UniformityMode mode = UniformityMode::ZComponent);

/// Axis-aligned sample grid. A count of 1 on an axis samples only `min` on that axis.
struct GridSpec {
  double xMin = 0.0, xMax = 0.0;
  double yMin = 0.0, yMax = 0.0;
  double zMin = 0.0, zMax = 0.0;
  std::size_t nx = 1, ny = 1, nz = 1;

  std::size_t size() const { return nx * ny * nz; }
  /// Row-major ordering: x varies slowest, z fastest.
  Point at(std::size_t ix, std::size_t iy, std::size_t iz) const;
  std::vector<Point> points() const;
};

struct FieldSample {
  Point point;
  FieldVector field;
  double uniformityPct = 0.0;
};

std::vector<FieldSample> field_map(const HelmholtzPair& pair, const GridSpec& grid,
                                   UniformityMode mode = UniformityMode::ZComponent);

/// CSV with header `x_m,y_m,z_m,bx_T,by_T,bz_T,uniformity_pct`.
std::string field_map_csv(const std::vector<FieldSample>& rows);

}  // namespace hilsim::magnetics
