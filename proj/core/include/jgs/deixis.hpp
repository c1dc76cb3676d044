#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jgs/geometry.hpp"
#include "jgs/scene.hpp"

namespace jgs {

/// One pointing gesture: where the hand is, where it points, and how wide
/// a spread of the scene it may refer to.
class DeicticAction {
 public:
  /// `direction` is normalized. `apex_angle` is the full cone angle in
  /// radians, in (0, pi]. Without `max_range` the cone reaches across the
  /// whole scene (the grid diagonal).
  DeicticAction(Point2 origin, Point2 direction, double apex_angle,
                std::optional<double> max_range = std::nullopt);

  Point2 origin() const { return origin_; }
  Point2 direction() const { return direction_; }
  double apex_angle() const { return apex_angle_; }
  const std::optional<double>& max_range() const { return max_range_; }

  ConeRegion region(const GridSpec& grid) const;

  friend bool operator==(const DeicticAction&, const DeicticAction&) = default;

 private:
  Point2 origin_;
  Point2 direction_;
  double apex_angle_;
  std::optional<double> max_range_;
};

/// Gestures exchanged within one episode, in time order.
class GestureSequence {
 public:
  GestureSequence() = default;
  /// Throws kInvalidArgument unless sizes match, timestamps are non-negative
  /// and strictly increasing.
  GestureSequence(std::vector<DeicticAction> actions, std::vector<double> timestamps);

  /// Throws kInvalidArgument if `t` does not follow the last timestamp.
  void append(const DeicticAction& action, double t);

  std::span<const DeicticAction> actions() const { return actions_; }
  std::span<const double> timestamps() const { return timestamps_; }
  std::size_t size() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }

  friend bool operator==(const GestureSequence&, const GestureSequence&) = default;

 private:
  std::vector<DeicticAction> actions_;
  std::vector<double> timestamps_;
};

struct CandidateSet {
  std::vector<int> piece_ids;  // sorted
  /// Centroid of the (fused) cone footprint.
  Point2 region_centroid;
  /// One footprint centroid per gesture whose footprint touched the grid.
  std::vector<Point2> action_centroids;
};

/// Per-piece mask centroids, computed once per scene.
struct PieceCentroids {
  std::vector<int> ids;
  std::vector<Point2> centroids;

  /// Pieces whose silhouette misses the grid entirely are left out.
  static PieceCentroids of(const Scene& scene);
};

/// Pieces whose silhouette centroid lies in the gesture's cone. Throws
/// kEmptyRegion when the cone footprint covers no pixel of the grid.
CandidateSet pieces_in_region(const Scene& scene, const DeicticAction& action);
CandidateSet pieces_in_region(const Scene& scene, const PieceCentroids& centroids,
                              const DeicticAction& action);

inline constexpr std::size_t kDefaultEnumerationCap = 10;

/// All non-empty subsets of `ids`, ordered by size and then
/// lexicographically. Throws EnumerationCapError when |ids| > cap.
std::vector<std::vector<int>> enumerate_hypotheses(std::span<const int> ids,
                                                   std::size_t cap = kDefaultEnumerationCap);

/// Union of per-gesture candidates; the fused region centroid is the mean
/// of the per-gesture footprint centroids. Gestures whose footprint misses
/// the grid contribute nothing; if all miss, throws kEmptyRegion.
CandidateSet fuse_gestures(const Scene& scene, const GestureSequence& gestures);
CandidateSet fuse_gestures(const Scene& scene, const PieceCentroids& centroids,
                           const GestureSequence& gestures);

}  // namespace jgs
