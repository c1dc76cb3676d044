#include "jgs/grid.hpp"

#include <algorithm>
#include <string>

#include "jgs/error.hpp"

namespace jgs {

void GridSpec::validate() const {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  if (!is_finite(min) || !is_finite(max) || !(max.x > min.x) || !(max.y > min.y)) {
    throw Error(ErrorCode::kInvalidArgument, "grid scene rectangle is degenerate");
  }
}

ForegroundMap::ForegroundMap(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  bits_.assign(grid_.pixel_count(), 0);
}

ForegroundMap::ForegroundMap(const GridSpec& grid, std::vector<std::uint8_t> bits)
    : grid_(grid), bits_(std::move(bits)) {
  grid_.validate();
  if (bits_.size() != grid_.pixel_count()) {
    throw Error(ErrorCode::kInvalidArgument, "bit count does not match grid");
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw Error(ErrorCode::kInvalidArgument, "foreground bits must be 0 or 1");
  }
}

std::size_t ForegroundMap::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ForegroundMap& ForegroundMap::operator|=(const ForegroundMap& other) {
  if (!(grid_ == other.grid_)) {
    throw Error(ErrorCode::kGridMismatch, "cannot combine maps on different grids");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

}  // namespace jgs
