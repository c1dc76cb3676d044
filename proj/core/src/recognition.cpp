#include "jgs/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"
#include "parallel.hpp"

namespace jgs {
namespace {

double l2(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

}  // namespace

KnownObjects::KnownObjects(std::vector<KnownObject> entries, HogConfig config)
    : entries_(std::move(entries)), config_(config) {
  config_.validate();
  if (entries_.empty()) throw Error(ErrorCode::kInvalidArgument, "no known objects");
  norms_.reserve(entries_.size());
  for (const KnownObject& e : entries_) {
    if (e.centroid.size() != config_.descriptor_length()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "centroid of '" + e.label + "' has length " + std::to_string(e.centroid.size()) +
                      ", expected " + std::to_string(config_.descriptor_length()));
    }
    if (!(e.threshold > 0.0) || e.threshold > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "threshold of '" + e.label + "' outside (0, 1]");
    }
    norms_.push_back(l2(e.centroid));
  }
}

double KnownObjects::similarity(std::span<const double> descriptor, std::size_t entry) const {
  const std::vector<double>& c = entries_[entry].centroid;
  const double nc = norms_[entry];
  const double nd = l2(descriptor);
  if (nd == 0.0 && nc == 0.0) return 1.0;
  if (nd == 0.0 || nc == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) d += descriptor[i] * c[i];
  return d / (nd * nc);
}

KnownObjects train(std::span<const Exemplar> exemplars, const HogConfig& cfg) {
  cfg.validate();
  if (exemplars.empty()) throw Error(ErrorCode::kInvalidArgument, "no training exemplars");

  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<std::vector<double>>> groups;
  for (const Exemplar& ex : exemplars) {
    const auto key = std::make_pair(ex.label, ex.group);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(describe(ex.mask, cfg).values);
  }

  std::vector<KnownObject> entries;
  entries.reserve(order.size());
  for (const auto& key : order) {
    const auto& members = groups[key];
    std::vector<double> mean(cfg.descriptor_length(), 0.0);
    for (const auto& d : members) {
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += d[i];
    }
    for (double& v : mean) v /= static_cast<double>(members.size());
    entries.push_back({key.first, std::move(mean), kMaxTrainedThreshold});
  }

  // Thresholds come from the same similarity routine classify uses, so every
  // member is accepted by its own entry.
  const KnownObjects provisional(entries, cfg);
  for (std::size_t e = 0; e < order.size(); ++e) {
    double lowest = 1.0;
    for (const auto& d : groups[order[e]]) lowest = std::min(lowest, provisional.similarity(d, e));
    // Keep the threshold in (0, 1]; a member orthogonal to its own mean cannot
    // arise from non-negative descriptors unless the group mixes zero and
    // non-zero vectors.
    entries[e].threshold = std::max(std::min(lowest, kMaxTrainedThreshold), 1e-12);
  }
  return KnownObjects(std::move(entries), cfg);
}

std::vector<Exemplar> scene_exemplars(const Scene& scene) {
  std::vector<Exemplar> out;
  for (const PartLabel& part : scene.labels) {
    ForegroundMap mask = subset_foreground(scene, part.piece_ids);
    if (mask.empty()) continue;
    out.push_back({part.label, scene.figure_name + "/" + part.label, std::move(mask)});
  }
  return out;
}

std::vector<Classification> classify_descriptor(std::span<const double> descriptor,
                                                const KnownObjects& known) {
  std::vector<Classification> out;
  out.reserve(known.size());
  for (std::size_t e = 0; e < known.size(); ++e) {
    const double s = known.similarity(descriptor, e);
    out.push_back({e, s, s >= known.entries()[e].threshold});
  }
  return out;
}

std::vector<Classification> classify(const ForegroundMap& hypothesis, const KnownObjects& known) {
  return classify_descriptor(describe(hypothesis, known.config()).values, known);
}

double inverse_distance(Point2 a, Point2 b, double softening) {
  return 1.0 / (softening + distance(a, b));
}

std::vector<RankedPrediction> rank(std::vector<RankCandidate> candidates,
                                   std::span<const Point2> action_centroids,
                                   const KnownObjects& known, const RankerConfig& cfg) {
  if (!(cfg.softening > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ranking softening constant must be positive");
  }
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no accepted hypotheses to rank");
  if (action_centroids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ranking needs at least one gesture centroid");
  }
  std::vector<double> scores(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (Point2 ca : action_centroids) {
      scores[i] += inverse_distance(candidates[i].centroid, ca, cfg.softening);
    }
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (candidates[a].entry != candidates[b].entry) return candidates[a].entry < candidates[b].entry;
    return candidates[a].hypothesis < candidates[b].hypothesis;
  });

  std::vector<RankedPrediction> out;
  out.reserve(order.size());
  for (std::size_t i : order) {
    RankCandidate& c = candidates[i];
    out.push_back({std::move(c.foreground), known.entries()[c.entry].label, scores[i], c.centroid,
                   c.entry, std::move(c.piece_ids)});
  }
  return out;
}

std::vector<std::vector<int>> candidate_hypotheses(std::span<const int> ids,
                                                   const PredictConfig& cfg) {
  try {
    return enumerate_hypotheses(ids, cfg.enumeration_cap);
  } catch (const EnumerationCapError&) {
    if (!cfg.cap_fallback) throw;
  }
  std::vector<int> all(ids.begin(), ids.end());
  std::sort(all.begin(), all.end());
  std::vector<std::vector<int>> out;
  for (int id : all) out.push_back({id});
  out.push_back(all);
  return out;
}

std::vector<RankedPrediction> predict_ranked(const Scene& scene, const GestureSequence& gestures,
                                             const KnownObjects& known, const PredictConfig& cfg) {
  const PieceCentroids centroids = PieceCentroids::of(scene);
  const CandidateSet candidates = fuse_gestures(scene, centroids, gestures);
  if (candidates.piece_ids.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "no piece lies inside the gesture region");
  }
  const std::vector<std::vector<int>> hypotheses =
      candidate_hypotheses(candidates.piece_ids, cfg);

  std::map<int, ForegroundMap> silhouettes;
  for (int id : candidates.piece_ids) silhouettes.emplace(id, piece_silhouette(scene, id));

  // Per-hypothesis results, merged in enumeration order afterwards.
  std::vector<std::vector<RankCandidate>> accepted(hypotheses.size());
  detail::parallel_for(hypotheses.size(), cfg.jobs, [&](std::size_t h) {
    ForegroundMap mask(scene.grid);
    for (int id : hypotheses[h]) mask |= silhouettes.at(id);
    if (mask.empty()) return;
    const HogDescriptor d = describe(mask, known.config());
    const Point2 cz = mask_centroid(mask);
    for (const Classification& c : classify_descriptor(d.values, known)) {
      if (c.accepted) accepted[h].push_back({c.entry, h, hypotheses[h], mask, cz});
    }
  });

  std::vector<RankCandidate> merged;
  for (auto& list : accepted) {
    for (auto& c : list) merged.push_back(std::move(c));
  }
  if (merged.empty()) {
    throw Error(ErrorCode::kNoCandidates, "no hypothesis was recognized as a known object");
  }
  return rank(std::move(merged), candidates.action_centroids, known, cfg.ranker);
}

RankedPrediction predict_foreground(const Scene& scene, const GestureSequence& gestures,
                                    const KnownObjects& known, const PredictConfig& cfg) {
  return predict_ranked(scene, gestures, known, cfg).front();
}

}  // namespace jgs
