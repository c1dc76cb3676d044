#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace jgs {

/// A location in scene units.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Raster layout over a scene rectangle. Column 0 sits at `min.x`, row 0 at
/// `min.y`; pixel (col, row) covers
/// [min.x + col*dx, min.x + (col+1)*dx) x [min.y + row*dy, min.y + (row+1)*dy).
struct GridSpec {
  int width = 128;
  int height = 128;
  Point2 min{0.0, 0.0};
  Point2 max{16.0, 16.0};

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  /// Throws kInvalidArgument when dimensions or the rectangle are degenerate.
  void validate() const;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double pixel_width() const { return (max.x - min.x) / width; }
  double pixel_height() const { return (max.y - min.y) / height; }
  double diagonal() const { return distance(min, max); }

  Point2 pixel_center(int col, int row) const {
    return {min.x + (col + 0.5) * pixel_width(), min.y + (row + 0.5) * pixel_height()};
  }
};

/// Binary map over a grid, row-major. Used both for reported goals and for
/// predictions.
class ForegroundMap {
 public:
  ForegroundMap() = default;
  explicit ForegroundMap(const GridSpec& grid);
  /// Takes ownership of `bits`; every value must be 0 or 1 and the size must
  /// match the grid.
  ForegroundMap(const GridSpec& grid, std::vector<std::uint8_t> bits);

  const GridSpec& grid() const { return grid_; }
  int width() const { return grid_.width; }
  int height() const { return grid_.height; }
  std::size_t size() const { return bits_.size(); }

  bool at(int col, int row) const { return bits_[index(col, row)] != 0; }
  void set(int col, int row, bool value) { bits_[index(col, row)] = value ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  /// Pixel-wise OR; grids must match.
  ForegroundMap& operator|=(const ForegroundMap& other);

  friend bool operator==(const ForegroundMap&, const ForegroundMap&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.width) +
           static_cast<std::size_t>(col);
  }

  GridSpec grid_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace jgs
