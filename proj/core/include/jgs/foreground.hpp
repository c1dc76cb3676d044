#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jgs/grid.hpp"

namespace jgs {

/// Continuous per-pixel salience in [0, 1].
class SalienceMap {
 public:
  explicit SalienceMap(const GridSpec& grid);
  /// Values are clamped into [0, 1]; non-finite values are rejected.
  SalienceMap(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  double at(int col, int row) const { return values_[index(col, row)]; }
  void set(int col, int row, double v);
  std::span<const double> values() const { return values_; }

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.width) +
           static_cast<std::size_t>(col);
  }

  GridSpec grid_;
  std::vector<double> values_;
};

/// Error between a reported and a predicted foreground:
///   (1 / (w*h)) * sqrt(sum_ij (pr_ij - pp_ij)^2)
/// Bounded by 1/sqrt(w*h). Throws kGridMismatch when grids differ.
double nmse(const ForegroundMap& reported, const ForegroundMap& predicted);

/// Number of differing pixels.
std::size_t hamming(const ForegroundMap& a, const ForegroundMap& b);

/// Bit set iff value >= tau.
ForegroundMap threshold(const SalienceMap& salience, double tau);

/// Mean of set-pixel centers in scene coordinates. Throws kEmptyForeground.
Point2 mask_centroid(const ForegroundMap& mask);

/// Registration stage between goal and prediction. Both maps already share
/// scene coordinates, so this only checks the grids and passes them through.
std::pair<ForegroundMap, ForegroundMap> align(const ForegroundMap& goal,
                                              const ForegroundMap& prediction);

/// Row-major run lengths, alternating zeros/ones and starting with zeros.
std::vector<std::uint32_t> rle_encode(const ForegroundMap& mask);
/// Throws kRleMismatch if the runs do not sum to the grid's pixel count.
ForegroundMap rle_decode(const GridSpec& grid, const std::vector<std::uint32_t>& runs);

/// Plain-text PGM (P2), 0 for background and 255 for foreground. Row 0 of
/// the map is written first.
std::string to_pgm(const ForegroundMap& mask);

}  // namespace jgs
