#include "jgs/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "jgs/error.hpp"

namespace jgs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

// Pixel index range [lo, hi) whose centers may fall in [a, b] along one axis.
std::pair<int, int> pixel_span(double a, double b, double origin, double step, int count) {
  const double lo_f = std::clamp(std::floor((a - origin) / step - 0.5), 0.0, double(count));
  const double hi_f = std::clamp(std::ceil((b - origin) / step + 0.5) + 1.0, 0.0, double(count));
  const int lo = static_cast<int>(lo_f);
  return {lo, std::max(lo, static_cast<int>(hi_f))};
}

}  // namespace

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "polygon needs at least three vertices");
  }
  if (!std::all_of(vertices_.begin(), vertices_.end(), is_finite)) {
    throw Error(ErrorCode::kInvalidArgument, "polygon has non-finite vertices");
  }
  const double area = signed_area(vertices_);
  if (area == 0.0) throw Error(ErrorCode::kDegenerateGeometry, "polygon has zero area");
  if (area < 0.0) throw Error(ErrorCode::kInvalidArgument, "polygon winding must be CCW");
  if (!is_simple(vertices_)) {
    throw Error(ErrorCode::kInvalidArgument, "polygon is self-intersecting");
  }
}

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Pose::Pose(Point2 translation, double rotation, bool mirrored)
    : translation_(translation), rotation_(normalize_angle(rotation)), mirrored_(mirrored) {
  if (!is_finite(translation) || !std::isfinite(rotation)) {
    throw Error(ErrorCode::kInvalidArgument, "pose must be finite");
  }
}

Point2 Pose::apply(Point2 p) const {
  if (mirrored_) p.x = -p.x;
  const double c = std::cos(rotation_);
  const double s = std::sin(rotation_);
  return {c * p.x - s * p.y + translation_.x, s * p.x + c * p.y + translation_.y};
}

double signed_area(std::span<const Point2> ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    twice += cross(ring[i], ring[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Polygon apply_pose(const Polygon& poly, const Pose& pose) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (Point2 v : poly.vertices()) out.push_back(pose.apply(v));
  if (pose.mirrored()) std::reverse(out.begin(), out.end());
  return Polygon(std::move(out));
}

Point2 polygon_centroid(std::span<const Point2> ring) {
  if (ring.size() < 3) throw Error(ErrorCode::kDegenerateGeometry, "centroid needs a ring");
  double twice_area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const double w = cross(a, b);
    twice_area += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  if (twice_area == 0.0 || !std::isfinite(twice_area)) {
    throw Error(ErrorCode::kDegenerateGeometry, "centroid of a zero-area polygon");
  }
  return {cx / (3.0 * twice_area), cy / (3.0 * twice_area)};
}

bool point_in_polygon(std::span<const Point2> ring, Point2 p) {
  bool inside = false;
  for (std::size_t i = 0, n = ring.size(), j = n - 1; i < n; j = i++) {
    const Point2 a = ring[i];
    const Point2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

ForegroundMap rasterize(std::span<const Polygon> polys, const GridSpec& grid) {
  ForegroundMap map(grid);
  const double dx = grid.pixel_width();
  const double dy = grid.pixel_height();
  for (const Polygon& poly : polys) {
    double x0 = poly.vertices()[0].x, x1 = x0;
    double y0 = poly.vertices()[0].y, y1 = y0;
    for (Point2 v : poly.vertices()) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
    const auto [c0, c1] = pixel_span(x0, x1, grid.min.x, dx, grid.width);
    const auto [r0, r1] = pixel_span(y0, y1, grid.min.y, dy, grid.height);
    for (int row = r0; row < r1; ++row) {
      for (int col = c0; col < c1; ++col) {
        if (!map.at(col, row) && point_in_polygon(poly.vertices(), grid.pixel_center(col, row))) {
          map.set(col, row, true);
        }
      }
    }
  }
  return map;
}

ConeRegion::ConeRegion(Point2 apex, Point2 direction, double apex_angle, double max_range)
    : apex_(apex), apex_angle_(apex_angle), max_range_(max_range) {
  const double len = norm(direction);
  if (!is_finite(apex) || !is_finite(direction) || !(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::kInvalidArgument, "cone needs a finite apex and non-zero direction");
  }
  if (!(apex_angle > 0.0) || apex_angle > std::numbers::pi) {
    throw Error(ErrorCode::kInvalidArgument, "cone apex angle must lie in (0, pi]");
  }
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw Error(ErrorCode::kInvalidArgument, "cone range must be positive");
  }
  direction_ = {direction.x / len, direction.y / len};
}

bool point_in_cone(const ConeRegion& region, Point2 p) {
  const Point2 d = p - region.apex();
  const double r = norm(d);
  if (r == 0.0) return true;
  if (r > region.max_range()) return false;
  const double off_axis =
      std::atan2(std::abs(cross(region.direction(), d)), dot(region.direction(), d));
  return off_axis <= 0.5 * region.apex_angle();
}

ForegroundMap cone_mask(const ConeRegion& region, const GridSpec& grid) {
  ForegroundMap map(grid);
  const Point2 a = region.apex();
  const double r = region.max_range();
  const auto [c0, c1] = pixel_span(a.x - r, a.x + r, grid.min.x, grid.pixel_width(), grid.width);
  const auto [r0, r1] = pixel_span(a.y - r, a.y + r, grid.min.y, grid.pixel_height(), grid.height);
  for (int row = r0; row < r1; ++row) {
    for (int col = c0; col < c1; ++col) {
      if (point_in_cone(region, grid.pixel_center(col, row))) map.set(col, row, true);
    }
  }
  return map;
}

}  // namespace jgs
