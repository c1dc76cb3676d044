#include "jgs/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jgs/error.hpp"

namespace jgs {
namespace {

constexpr double kNormEpsilon = 1e-3;

void normalize_l2(std::span<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq + kNormEpsilon * kNormEpsilon);
  for (double& x : v) x /= n;
}

}  // namespace

void HogConfig::validate() const {
  if (window <= 0 || cell <= 0 || block <= 0 || block_stride <= 0 || bins <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "HOG parameters must be positive");
  }
  if (window % cell != 0) {
    throw Error(ErrorCode::kInvalidArgument, "HOG window must be divisible by the cell size");
  }
  if (block > cells_per_side()) {
    throw Error(ErrorCode::kInvalidArgument, "HOG block larger than the cell grid");
  }
  if (!(clip > 0.0)) throw Error(ErrorCode::kInvalidArgument, "HOG clip must be positive");
}

PixelWindow canonical_window(const ForegroundMap& mask, const HogConfig& cfg) {
  cfg.validate();
  int c0 = mask.width(), c1 = -1, r0 = mask.height(), r1 = -1;
  for (int row = 0; row < mask.height(); ++row) {
    for (int col = 0; col < mask.width(); ++col) {
      if (!mask.at(col, row)) continue;
      c0 = std::min(c0, col);
      c1 = std::max(c1, col);
      r0 = std::min(r0, row);
      r1 = std::max(r1, row);
    }
  }
  if (c1 < 0) throw Error(ErrorCode::kEmptyForeground, "cannot frame an empty foreground");

  const int bw = c1 - c0 + 1;
  const int bh = r1 - r0 + 1;
  const int side = std::max(bw, bh);
  const int off_x = (side - bw) / 2;
  const int off_y = (side - bh) / 2;

  PixelWindow out;
  out.size = cfg.window;
  out.pixels.assign(static_cast<std::size_t>(cfg.window) * cfg.window, 0.0);
  const auto w = static_cast<long long>(cfg.window);
  for (int y = 0; y < cfg.window; ++y) {
    // Source index floor((dst + 0.5) * side / window), in integers.
    const long long sy = ((2LL * y + 1) * side) / (2 * w) - off_y;
    if (sy < 0 || sy >= bh) continue;
    for (int x = 0; x < cfg.window; ++x) {
      const long long sx = ((2LL * x + 1) * side) / (2 * w) - off_x;
      if (sx < 0 || sx >= bw) continue;
      if (mask.at(c0 + static_cast<int>(sx), r0 + static_cast<int>(sy))) {
        out.pixels[static_cast<std::size_t>(y) * cfg.window + x] = 1.0;
      }
    }
  }
  return out;
}

std::vector<double> cell_histograms(const PixelWindow& window, const HogConfig& cfg) {
  cfg.validate();
  if (window.size != cfg.window ||
      window.pixels.size() != static_cast<std::size_t>(cfg.window) * cfg.window) {
    throw Error(ErrorCode::kInvalidArgument, "window size does not match the HOG config");
  }
  const int n = window.size;
  const int cps = cfg.cells_per_side();
  const double bin_width = std::numbers::pi / cfg.bins;
  std::vector<double> hist(static_cast<std::size_t>(cps) * cps * cfg.bins, 0.0);

  auto diff = [n](int i, auto&& value) {
    // Centered in the interior, one-sided at the border.
    if (n == 1) return 0.0;
    if (i == 0) return value(1) - value(0);
    if (i == n - 1) return value(n - 1) - value(n - 2);
    return value(i + 1) - value(i - 1);
  };

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double gx = diff(x, [&](int k) { return window.at(k, y); });
      const double gy = diff(y, [&](int k) { return window.at(x, k); });
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += std::numbers::pi;
      if (angle >= std::numbers::pi) angle -= std::numbers::pi;
      const double pos = angle / bin_width;
      const double lower = std::floor(pos);
      const double frac = pos - lower;
      const int b0 = static_cast<int>(lower) % cfg.bins;
      const int b1 = (b0 + 1) % cfg.bins;
      const std::size_t cell =
          static_cast<std::size_t>(y / cfg.cell) * cps + static_cast<std::size_t>(x / cfg.cell);
      hist[cell * cfg.bins + b0] += (1.0 - frac) * mag;
      hist[cell * cfg.bins + b1] += frac * mag;
    }
  }
  return hist;
}

HogDescriptor hog(const PixelWindow& window, const HogConfig& cfg) {
  const std::vector<double> hist = cell_histograms(window, cfg);
  const int cps = cfg.cells_per_side();
  const int bps = cfg.blocks_per_side();
  const auto bins = static_cast<std::size_t>(cfg.bins);

  HogDescriptor out{{}, cfg};
  out.values.reserve(cfg.descriptor_length());
  std::vector<double> block;
  for (int by = 0; by < bps; ++by) {
    for (int bx = 0; bx < bps; ++bx) {
      block.clear();
      for (int i = 0; i < cfg.block; ++i) {
        for (int j = 0; j < cfg.block; ++j) {
          const std::size_t cell =
              static_cast<std::size_t>(by * cfg.block_stride + i) * cps +
              static_cast<std::size_t>(bx * cfg.block_stride + j);
          block.insert(block.end(), hist.begin() + static_cast<long>(cell * bins),
                       hist.begin() + static_cast<long>((cell + 1) * bins));
        }
      }
      // L2-hys.
      normalize_l2(block);
      for (double& v : block) v = std::min(v, cfg.clip);
      normalize_l2(block);
      out.values.insert(out.values.end(), block.begin(), block.end());
    }
  }
  return out;
}

HogDescriptor describe(const ForegroundMap& mask, const HogConfig& cfg) {
  return hog(canonical_window(mask, cfg), cfg);
}

}  // namespace jgs
