#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "jgs/grid.hpp"

namespace jgs {

/// Simple counter-clockwise polygon with at least three vertices.
class Polygon {
 public:
  /// Throws kInvalidArgument for fewer than three or non-finite vertices,
  /// self-intersection, or clockwise winding; kDegenerateGeometry for zero
  /// area.
  explicit Polygon(std::vector<Point2> vertices);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point2> vertices_;
};

/// Rigid placement of a piece: optional mirror about the local y axis, then
/// rotation about the local origin, then translation.
class Pose {
 public:
  Pose() = default;
  Pose(Point2 translation, double rotation, bool mirrored = false);

  Point2 translation() const { return translation_; }
  /// Always in [0, 2*pi).
  double rotation() const { return rotation_; }
  bool mirrored() const { return mirrored_; }

  Point2 apply(Point2 p) const;

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  Point2 translation_{};
  double rotation_ = 0.0;
  bool mirrored_ = false;
};

double normalize_angle(double radians);

/// Shoelace signed area; positive for counter-clockwise rings.
double signed_area(std::span<const Point2> ring);

Polygon apply_pose(const Polygon& poly, const Pose& pose);

/// Area-weighted centroid. Throws kDegenerateGeometry for zero-area rings.
Point2 polygon_centroid(std::span<const Point2> ring);
inline Point2 polygon_centroid(const Polygon& poly) { return polygon_centroid(poly.vertices()); }

/// Even-odd crossing test.
bool point_in_polygon(std::span<const Point2> ring, Point2 p);

/// Pixel is set iff its center lies inside any polygon. Parts outside the
/// grid are clipped.
ForegroundMap rasterize(std::span<const Polygon> polys, const GridSpec& grid);

/// Planar cone: apex, unit axis, full apex angle, and a range cut-off.
class ConeRegion {
 public:
  /// `direction` is normalized; throws kInvalidArgument for a zero or
  /// non-finite direction, angle outside (0, pi], or non-positive range.
  ConeRegion(Point2 apex, Point2 direction, double apex_angle, double max_range);

  Point2 apex() const { return apex_; }
  Point2 direction() const { return direction_; }
  double apex_angle() const { return apex_angle_; }
  double max_range() const { return max_range_; }

 private:
  Point2 apex_;
  Point2 direction_;
  double apex_angle_;
  double max_range_;
};

/// Inside iff within range and no more than half the apex angle off axis.
/// The apex itself is inside.
bool point_in_cone(const ConeRegion& region, Point2 p);

/// Pixel-center footprint of the cone on the grid.
ForegroundMap cone_mask(const ConeRegion& region, const GridSpec& grid);

}  // namespace jgs
