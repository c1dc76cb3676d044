#include "jgs/deixis.hpp"

#include <algorithm>
#include <cmath>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"

namespace jgs {

DeicticAction::DeicticAction(Point2 origin, Point2 direction, double apex_angle,
                             std::optional<double> max_range)
    : origin_(origin), apex_angle_(apex_angle), max_range_(max_range) {
  // ConeRegion carries the full validation; build one to reuse it.
  const ConeRegion probe(origin, direction, apex_angle, max_range.value_or(1.0));
  direction_ = probe.direction();
}

ConeRegion DeicticAction::region(const GridSpec& grid) const {
  return ConeRegion(origin_, direction_, apex_angle_, max_range_.value_or(grid.diagonal()));
}

GestureSequence::GestureSequence(std::vector<DeicticAction> actions,
                                 std::vector<double> timestamps) {
  if (actions.size() != timestamps.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one timestamp per gesture is required");
  }
  for (std::size_t i = 0; i < actions.size(); ++i) append(actions[i], timestamps[i]);
}

void GestureSequence::append(const DeicticAction& action, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "gesture timestamp must be non-negative");
  }
  if (!timestamps_.empty() && !(t > timestamps_.back())) {
    throw Error(ErrorCode::kInvalidArgument, "gesture timestamps must be strictly increasing");
  }
  actions_.push_back(action);
  timestamps_.push_back(t);
}

PieceCentroids PieceCentroids::of(const Scene& scene) {
  PieceCentroids out;
  for (int id : scene.piece_ids()) {
    const ForegroundMap mask = piece_silhouette(scene, id);
    if (mask.empty()) continue;
    out.ids.push_back(id);
    out.centroids.push_back(mask_centroid(mask));
  }
  return out;
}

CandidateSet pieces_in_region(const Scene& scene, const DeicticAction& action) {
  return pieces_in_region(scene, PieceCentroids::of(scene), action);
}

CandidateSet pieces_in_region(const Scene& scene, const PieceCentroids& centroids,
                              const DeicticAction& action) {
  const ConeRegion region = action.region(scene.grid);
  const ForegroundMap footprint = cone_mask(region, scene.grid);
  if (footprint.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "gesture cone does not cover any pixel of the scene");
  }
  CandidateSet out;
  for (std::size_t i = 0; i < centroids.ids.size(); ++i) {
    if (point_in_cone(region, centroids.centroids[i])) out.piece_ids.push_back(centroids.ids[i]);
  }
  out.region_centroid = mask_centroid(footprint);
  out.action_centroids.push_back(out.region_centroid);
  return out;
}

std::vector<std::vector<int>> enumerate_hypotheses(std::span<const int> ids, std::size_t cap) {
  if (cap < 1) throw Error(ErrorCode::kInvalidArgument, "enumeration cap must be at least 1");
  if (ids.size() > cap) throw EnumerationCapError(ids.size(), cap);
  std::vector<int> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const std::size_t k = sorted.size();
  std::vector<std::vector<int>> subsets;
  subsets.reserve((std::size_t{1} << k) - 1);
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << k); ++bits) {
    std::vector<int> subset;
    for (std::size_t i = 0; i < k; ++i) {
      if (bits & (std::uint64_t{1} << i)) subset.push_back(sorted[i]);
    }
    subsets.push_back(std::move(subset));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return subsets;
}

CandidateSet fuse_gestures(const Scene& scene, const GestureSequence& gestures) {
  return fuse_gestures(scene, PieceCentroids::of(scene), gestures);
}

CandidateSet fuse_gestures(const Scene& scene, const PieceCentroids& centroids,
                           const GestureSequence& gestures) {
  if (gestures.empty()) throw Error(ErrorCode::kInvalidArgument, "no gestures to fuse");
  CandidateSet fused;
  double sx = 0.0;
  double sy = 0.0;
  for (const DeicticAction& action : gestures.actions()) {
    CandidateSet one;
    try {
      one = pieces_in_region(scene, centroids, action);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptyRegion) continue;
      throw;
    }
    fused.piece_ids.insert(fused.piece_ids.end(), one.piece_ids.begin(), one.piece_ids.end());
    fused.action_centroids.push_back(one.region_centroid);
    sx += one.region_centroid.x;
    sy += one.region_centroid.y;
  }
  if (fused.action_centroids.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "no gesture cone covers any pixel of the scene");
  }
  std::sort(fused.piece_ids.begin(), fused.piece_ids.end());
  fused.piece_ids.erase(std::unique(fused.piece_ids.begin(), fused.piece_ids.end()),
                        fused.piece_ids.end());
  const auto n = static_cast<double>(fused.action_centroids.size());
  fused.region_centroid = {sx / n, sy / n};
  return fused;
}

}  // namespace jgs
