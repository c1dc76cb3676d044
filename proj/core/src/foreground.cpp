#include "jgs/foreground.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jgs/error.hpp"

namespace jgs {
namespace {

void require_same_grid(const ForegroundMap& a, const ForegroundMap& b) {
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorCode::kGridMismatch, "foreground maps are on different grids");
  }
}

}  // namespace

SalienceMap::SalienceMap(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  values_.assign(grid_.pixel_count(), 0.0);
}

SalienceMap::SalienceMap(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.pixel_count()) {
    throw Error(ErrorCode::kInvalidArgument, "salience value count does not match grid");
  }
  for (double& v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite salience");
    v = std::clamp(v, 0.0, 1.0);
  }
}

void SalienceMap::set(int col, int row, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite salience");
  values_[index(col, row)] = std::clamp(v, 0.0, 1.0);
}

std::size_t hamming(const ForegroundMap& a, const ForegroundMap& b) {
  require_same_grid(a, b);
  const auto x = a.bits();
  const auto y = b.bits();
  std::size_t diff = 0;
  for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] != y[i]);
  return diff;
}

double nmse(const ForegroundMap& reported, const ForegroundMap& predicted) {
  // Squared differences of binary maps are 0 or 1.
  const auto diff = static_cast<double>(hamming(reported, predicted));
  return std::sqrt(diff) / static_cast<double>(reported.grid().pixel_count());
}

ForegroundMap threshold(const SalienceMap& salience, double tau) {
  ForegroundMap out(salience.grid());
  const GridSpec& g = salience.grid();
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (salience.at(col, row) >= tau) out.set(col, row, true);
    }
  }
  return out;
}

Point2 mask_centroid(const ForegroundMap& mask) {
  const GridSpec& g = mask.grid();
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (!mask.at(col, row)) continue;
      const Point2 c = g.pixel_center(col, row);
      sx += c.x;
      sy += c.y;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptyForeground, "centroid of an empty foreground");
  return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

std::pair<ForegroundMap, ForegroundMap> align(const ForegroundMap& goal,
                                              const ForegroundMap& prediction) {
  require_same_grid(goal, prediction);
  return {goal, prediction};
}

std::vector<std::uint32_t> rle_encode(const ForegroundMap& mask) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (std::uint8_t b : mask.bits()) {
    if (b != current) {
      runs.push_back(length);
      current = b;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

ForegroundMap rle_decode(const GridSpec& grid, const std::vector<std::uint32_t>& runs) {
  grid.validate();
  std::uint64_t total = 0;
  for (std::uint32_t r : runs) total += r;
  if (total != grid.pixel_count()) {
    throw Error(ErrorCode::kRleMismatch, "run lengths sum to " + std::to_string(total) +
                                             ", grid has " +
                                             std::to_string(grid.pixel_count()) + " pixels");
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(grid.pixel_count());
  std::uint8_t value = 0;
  for (std::uint32_t r : runs) {
    bits.insert(bits.end(), r, value);
    value ^= 1;
  }
  return ForegroundMap(grid, std::move(bits));
}

std::string to_pgm(const ForegroundMap& mask) {
  std::ostringstream out;
  out << "P2\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (int row = 0; row < mask.height(); ++row) {
    for (int col = 0; col < mask.width(); ++col) {
      if (col > 0) out << ' ';
      out << (mask.at(col, row) ? 255 : 0);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace jgs
