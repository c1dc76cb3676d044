#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jgs/grid.hpp"

namespace jgs {

/// Dalal-Triggs style layout. Defaults give a 1764-long descriptor.
struct HogConfig {
  int window = 64;       // pixels per side
  int cell = 8;          // pixels per cell side
  int block = 2;         // cells per block side
  int block_stride = 1;  // cells
  int bins = 9;          // unsigned orientations over [0, 180)
  double clip = 0.2;     // L2-hys clipping value

  /// Throws kInvalidArgument on inconsistent values.
  void validate() const;

  int cells_per_side() const { return window / cell; }
  int blocks_per_side() const { return (cells_per_side() - block) / block_stride + 1; }
  std::size_t descriptor_length() const {
    return static_cast<std::size_t>(blocks_per_side()) * blocks_per_side() * block * block * bins;
  }

  friend bool operator==(const HogConfig&, const HogConfig&) = default;
};

/// Square single-channel image, row-major.
struct PixelWindow {
  int size = 0;
  std::vector<double> pixels;

  double at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(size) +
                  static_cast<std::size_t>(x)];
  }

  friend bool operator==(const PixelWindow&, const PixelWindow&) = default;
};

/// Crops the mask to its bounding box, zero-pads the short side to a
/// centered square, and resamples to cfg.window with nearest neighbour.
/// The result stays binary. Throws kEmptyForeground for an empty mask.
PixelWindow canonical_window(const ForegroundMap& mask, const HogConfig& cfg);

/// Unnormalized per-cell orientation histograms, cells row-major then bins.
std::vector<double> cell_histograms(const PixelWindow& window, const HogConfig& cfg);

struct HogDescriptor {
  std::vector<double> values;
  HogConfig config;
};

/// Throws kInvalidArgument if the window size differs from cfg.window.
HogDescriptor hog(const PixelWindow& window, const HogConfig& cfg);

/// hog(canonical_window(mask)).
HogDescriptor describe(const ForegroundMap& mask, const HogConfig& cfg);

}  // namespace jgs
