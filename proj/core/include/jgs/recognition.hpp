#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jgs/deixis.hpp"
#include "jgs/features.hpp"
#include "jgs/scene.hpp"

namespace jgs {

/// One known object: a HOG centroid with its acceptance threshold. Several
/// entries may carry the same label.
struct KnownObject {
  std::string label;
  std::vector<double> centroid;
  double threshold = 0.85;

  friend bool operator==(const KnownObject&, const KnownObject&) = default;
};

/// The set of per-object acceptance tests over HOG space.
class KnownObjects {
 public:
  /// Throws kInvalidArgument for an empty entry list, a centroid of the
  /// wrong length, or a threshold outside (0, 1].
  KnownObjects(std::vector<KnownObject> entries, HogConfig config = {});

  std::span<const KnownObject> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const HogConfig& config() const { return config_; }

  /// Cosine similarity between a descriptor and an entry's centroid. Two
  /// all-zero vectors count as identical (1); one zero vector gives 0.
  double similarity(std::span<const double> descriptor, std::size_t entry) const;

  friend bool operator==(const KnownObjects& a, const KnownObjects& b) {
    return a.entries_ == b.entries_ && a.config_ == b.config_;
  }

 private:
  std::vector<KnownObject> entries_;
  std::vector<double> norms_;
  HogConfig config_;
};

/// Labeled training mask. Exemplars sharing (label, group) form one entry.
struct Exemplar {
  std::string label;
  std::string group;
  ForegroundMap mask;
};

/// Highest acceptance threshold a trained entry may get.
inline constexpr double kMaxTrainedThreshold = 0.85;

/// Centroid = mean descriptor of the group; threshold = similarity of the
/// least similar group member to the centroid, capped at 0.85. Entries are
/// emitted in order of first appearance of their group.
KnownObjects train(std::span<const Exemplar> exemplars, const HogConfig& cfg = {});

/// Exemplars for every label of every scene, grouped per scene and label.
std::vector<Exemplar> scene_exemplars(const Scene& scene);

struct Classification {
  std::size_t entry = 0;
  double similarity = 0.0;
  bool accepted = false;
};

/// Evaluates every entry on the hypothesis. Throws kEmptyForeground.
std::vector<Classification> classify(const ForegroundMap& hypothesis, const KnownObjects& known);
std::vector<Classification> classify_descriptor(std::span<const double> descriptor,
                                                const KnownObjects& known);

struct RankerConfig {
  /// Softening constant in 1 / (c + distance); scene units.
  double softening = 1.0;
};

/// A hypothesis that passed some entry's test.
struct RankCandidate {
  std::size_t entry = 0;
  std::size_t hypothesis = 0;  // enumeration index, second tie-break
  std::vector<int> piece_ids;
  ForegroundMap foreground;
  Point2 centroid;
};

struct RankedPrediction {
  ForegroundMap foreground;
  std::string label;
  double score = 0.0;
  Point2 centroid;
  std::size_t entry = 0;
  std::vector<int> piece_ids;

  friend bool operator==(const RankedPrediction&, const RankedPrediction&) = default;
};

/// Inverse-distance evidence 1 / (c + ||a - b||).
double inverse_distance(Point2 a, Point2 b, double softening);

/// Scores each candidate by the sum over gesture centroids of the inverse
/// distance to its centroid and sorts descending; ties go to the lower
/// entry index, then the lower hypothesis index. Throws kNoCandidates for an
/// empty list.
std::vector<RankedPrediction> rank(std::vector<RankCandidate> candidates,
                                   std::span<const Point2> action_centroids,
                                   const KnownObjects& known, const RankerConfig& cfg = {});

struct PredictConfig {
  RankerConfig ranker;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  /// Over the cap, fall back to singletons plus the full candidate set
  /// instead of raising EnumerationCapError.
  bool cap_fallback = true;
  /// Worker threads for hypothesis classification; output does not depend
  /// on it.
  int jobs = 1;
};

/// Hypotheses examined for a candidate set, honoring the cap policy.
std::vector<std::vector<int>> candidate_hypotheses(std::span<const int> ids,
                                                   const PredictConfig& cfg);

/// Gestures -> candidate pieces -> piece-subset hypotheses -> accepted
/// hypotheses -> ranking. Returns the top entry. Throws kEmptyRegion when no
/// piece lies in any cone and kNoCandidates when nothing was accepted.
RankedPrediction predict_foreground(const Scene& scene, const GestureSequence& gestures,
                                    const KnownObjects& known, const PredictConfig& cfg = {});

/// Full ranked list behind predict_foreground.
std::vector<RankedPrediction> predict_ranked(const Scene& scene, const GestureSequence& gestures,
                                             const KnownObjects& known,
                                             const PredictConfig& cfg = {});

}  // namespace jgs
