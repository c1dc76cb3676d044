#include <cmath>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "jgs/error.hpp"
#include "jgs/evaluation.hpp"
#include "jgs/foreground.hpp"
#include "jgs/oracle.hpp"
#include "jgs/recognition.hpp"
#include "jgs/rng.hpp"

using namespace jgs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unit_vector(std::size_t i) {
  std::vector<double> v(HogConfig{}.descriptor_length(), 0.0);
  v[i] = 1.0;
  return v;
}

KnownObjects axis_entries(std::size_t n) {
  std::vector<KnownObject> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({"e" + std::to_string(i), unit_vector(i), 0.85});
  return KnownObjects(entries);
}

RankCandidate candidate_at(std::size_t entry, std::size_t hyp, Point2 c) {
  return {entry, hyp, {static_cast<int>(hyp)}, ForegroundMap(GridSpec{4, 4, {0, 0}, {4, 4}}), c};
}

// Well separated pieces so a narrow cone singles each one out.
Scene isolated_scene() {
  Scene s;
  s.figure_name = "spread";
  s.grid = GridSpec{};
  s.pieces.push_back({1, PieceKind::kSquare, Pose({-1, -1}, 0)});
  s.pieces.push_back({2, PieceKind::kLargeTriangleA, Pose({9, 1}, 0)});
  s.pieces.push_back({3, PieceKind::kParallelogram, Pose({1, 8}, 0)});
  s.pieces.push_back({4, PieceKind::kMediumTriangle, Pose({7, 7}, 0)});
  for (const Piece& p : s.pieces) s.labels.push_back({std::string(piece_kind_name(p.kind)), {p.id}});
  return s;
}

GestureSequence single(const DeicticAction& a) {
  GestureSequence g;
  g.append(a, 0.0);
  return g;
}

}  // namespace

TEST(KnownObjects, Validation) {
  EXPECT_THROW(KnownObjects({}), Error);
  EXPECT_THROW(KnownObjects({{"a", {1.0, 2.0}, 0.9}}), Error);
  EXPECT_THROW(KnownObjects({{"a", unit_vector(0), 0.0}}), Error);
  EXPECT_THROW(KnownObjects({{"a", unit_vector(0), 1.5}}), Error);
  const KnownObjects dup({{"a", unit_vector(0), 0.9}, {"a", unit_vector(1), 0.9}});
  EXPECT_EQ(dup.size(), 2u);
}

TEST(KnownObjects, SimilarityConventions) {
  const KnownObjects k({{"a", unit_vector(0), 0.9},
                        {"zero", std::vector<double>(1764, 0.0), 0.9}});
  EXPECT_DOUBLE_EQ(k.similarity(unit_vector(0), 0), 1.0);
  EXPECT_DOUBLE_EQ(k.similarity(unit_vector(1), 0), 0.0);
  EXPECT_DOUBLE_EQ(k.similarity(std::vector<double>(1764, 0.0), 1), 1.0);
  EXPECT_DOUBLE_EQ(k.similarity(unit_vector(0), 1), 0.0);
  EXPECT_DOUBLE_EQ(k.similarity(std::vector<double>(1764, 0.0), 0), 0.0);
}

TEST(Train, SingleExemplarEntry) {
  const Scene s = generate_scene(2, 3);
  const ForegroundMap m = piece_silhouette(s, s.pieces[0].id);
  const KnownObjects k = train(std::vector<Exemplar>{{"thing", "g", m}});
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k.entries()[0].centroid, describe(m, HogConfig{}).values);
  EXPECT_DOUBLE_EQ(k.entries()[0].threshold, 0.85);
  const KnownObjects twice = train(std::vector<Exemplar>{{"thing", "g", m}, {"thing", "g", m}});
  ASSERT_EQ(twice.size(), 1u);
  EXPECT_EQ(twice.entries()[0].centroid, k.entries()[0].centroid);
}

TEST(Train, GroupsByLabelAndGroup) {
  const Scene s = generate_scene(2, 3);
  const ForegroundMap a = piece_silhouette(s, s.pieces[0].id);
  const ForegroundMap b = piece_silhouette(s, s.pieces[1].id);
  const KnownObjects k = train(std::vector<Exemplar>{
      {"x", "g1", a}, {"x", "g2", b}, {"y", "g1", b}, {"x", "g1", b}});
  ASSERT_EQ(k.size(), 3u);
  EXPECT_EQ(k.entries()[0].label, "x");
  EXPECT_EQ(k.entries()[1].label, "x");
  EXPECT_EQ(k.entries()[2].label, "y");
  // The mixed group's threshold is its weakest member's similarity.
  const auto da = describe(a, HogConfig{}).values, db = describe(b, HogConfig{}).values;
  const double lowest = std::min(k.similarity(da, 0), k.similarity(db, 0));
  EXPECT_DOUBLE_EQ(k.entries()[0].threshold, std::min(lowest, 0.85));
}

TEST(Train, Errors) {
  EXPECT_THROW(train(std::vector<Exemplar>{}), Error);
  try {
    train(std::vector<Exemplar>{{"x", "g", ForegroundMap(GridSpec{})}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyForeground);
  }
}

TEST(Classify, SelfConsistencySweep) {
  Rng rng(91);
  std::vector<Exemplar> all;
  for (int i = 0; i < 20; ++i) {
    for (auto& e : scene_exemplars(generate_scene(rng.next(), rng.uniform_int(2, 7)))) {
      all.push_back(std::move(e));
    }
  }
  const KnownObjects k = train(all);
  // Entries follow first appearance of each (label, group).
  std::map<std::pair<std::string, std::string>, std::size_t> entry_of;
  for (const Exemplar& e : all) entry_of.try_emplace({e.label, e.group}, entry_of.size());
  ASSERT_EQ(k.size(), entry_of.size());
  for (const Exemplar& e : all) {
    EXPECT_TRUE(classify(e.mask, k)[entry_of.at({e.label, e.group})].accepted) << e.group;
  }
}

TEST(Classify, NoiseMasksRejected) {
  Rng rng(5150);
  std::vector<Exemplar> all;
  for (int i = 0; i < 20; ++i) {
    for (auto& e : scene_exemplars(generate_scene(rng.next(), 7))) all.push_back(std::move(e));
  }
  const KnownObjects k = train(all);
  int rejected = 0;
  for (int i = 0; i < 100; ++i) {
    ForegroundMap noise(GridSpec{});
    const double p = rng.uniform(0.2, 0.8);
    for (int r = 0; r < 128; ++r)
      for (int c = 0; c < 128; ++c) noise.set(c, r, rng.uniform() < p);
    bool any = false;
    for (const auto& c : classify(noise, k)) any = any || c.accepted;
    rejected += !any;
  }
  EXPECT_GE(rejected, 95);
}

TEST(Classify, OrthogonalDescriptorRejected) {
  const KnownObjects k = axis_entries(3);
  const auto out = classify_descriptor(unit_vector(4), k);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& c : out) {
    EXPECT_EQ(c.similarity, 0.0);
    EXPECT_FALSE(c.accepted);
  }
  EXPECT_TRUE(classify_descriptor(unit_vector(1), k)[1].accepted);
  EXPECT_THROW(classify(ForegroundMap(GridSpec{}), k), Error);
}

TEST(Classify, MonotoneInThreshold) {
  Rng rng(12);
  const Scene s = generate_scene(17, 7);
  const KnownObjects base = train(scene_exemplars(s));
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> ids;
    for (int id : s.piece_ids())
      if (rng.coin()) ids.push_back(id);
    if (ids.empty()) continue;
    const ForegroundMap h = subset_foreground(s, ids);
    std::vector<KnownObject> lowered(base.entries().begin(), base.entries().end());
    for (auto& e : lowered) e.threshold *= rng.uniform(0.5, 1.0);
    const auto hi = classify(h, base);
    const auto lo = classify(h, KnownObjects(lowered));
    for (std::size_t i = 0; i < hi.size(); ++i) EXPECT_TRUE(!hi[i].accepted || lo[i].accepted);
  }
}

TEST(Rank, InverseDistanceExamples) {
  EXPECT_DOUBLE_EQ(inverse_distance({2, 2}, {2, 2}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(inverse_distance({0, 0}, {3, 0}, 1.0), 0.25);
}

TEST(Rank, OrdersByDistance) {
  const KnownObjects k = axis_entries(3);
  const Point2 ca{5, 5};
  std::vector<RankCandidate> cs = {candidate_at(0, 0, {8, 5}), candidate_at(1, 1, {5, 5}),
                                   candidate_at(2, 2, {5, 6})};
  const auto out = rank(cs, std::span(&ca, 1), k);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].label, "e1");
  EXPECT_EQ(out[1].label, "e2");
  EXPECT_EQ(out[2].label, "e0");
  EXPECT_DOUBLE_EQ(out[0].score, 1.0);
  EXPECT_DOUBLE_EQ(out[1].score, 0.5);
  EXPECT_DOUBLE_EQ(out[2].score, 0.25);
}

TEST(Rank, TwoGesturesEquidistant) {
  const KnownObjects k = axis_entries(1);
  const std::vector<Point2> cas = {{4, 5}, {6, 5}};
  const auto out = rank({candidate_at(0, 0, {5, 5})}, cas, k);
  EXPECT_DOUBLE_EQ(out[0].score, 1.0);
}

TEST(Rank, TiesGoToLowestEntryThenHypothesis) {
  const KnownObjects k = axis_entries(3);
  const Point2 ca{0, 0};
  const auto out = rank({candidate_at(2, 0, {1, 0}), candidate_at(0, 3, {0, 1}),
                         candidate_at(0, 1, {-1, 0})},
                        std::span(&ca, 1), k);
  EXPECT_EQ(out[0].entry, 0u);
  EXPECT_EQ(out[0].piece_ids, std::vector<int>{1});
  EXPECT_EQ(out[1].piece_ids, std::vector<int>{3});
  EXPECT_EQ(out[2].entry, 2u);
}

TEST(Rank, Errors) {
  const KnownObjects k = axis_entries(1);
  const Point2 ca{0, 0};
  try {
    rank({}, std::span(&ca, 1), k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidates);
  }
  EXPECT_THROW(rank({candidate_at(0, 0, {1, 1})}, std::span(&ca, 1), k, RankerConfig{0.0}), Error);
  EXPECT_THROW(rank({candidate_at(0, 0, {1, 1})}, {}, k), Error);
}

TEST(Predict, SinglePieceScene) {
  Scene s;
  s.grid = GridSpec{};
  s.pieces.push_back({1, PieceKind::kLargeTriangleB, Pose({5, 5}, 0.7)});
  s.labels.push_back({"large-triangle", {1}});
  const KnownObjects k = train(scene_exemplars(s));
  const Point2 c = mask_centroid(piece_silhouette(s, 1));
  const auto p =
      predict_foreground(s, single(DeicticAction(c - Point2{3, 0}, {1, 0}, 0.4)), k);
  EXPECT_EQ(p.piece_ids, std::vector<int>{1});
  EXPECT_EQ(p.label, "large-triangle");
  EXPECT_EQ(nmse(piece_silhouette(s, 1), p.foreground), 0.0);
}

TEST(Predict, NarrowConeAtEmptySpace) {
  const Scene s = isolated_scene();
  const KnownObjects k = train(scene_exemplars(s));
  try {
    predict_foreground(s, single(DeicticAction({15, 15}, {1, 0}, 0.05)), k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRegion);
  }
}

TEST(Predict, NothingRecognizedIsNoCandidates) {
  const Scene s = isolated_scene();
  // The only known object is a shape absent from the scene.
  ForegroundMap ring(GridSpec{});
  for (int k = 20; k < 100; ++k) ring.set(k, 20, true), ring.set(20, k, true);
  const KnownObjects k = train(std::vector<Exemplar>{{"ring", "g", ring}});
  try {
    predict_foreground(s, single(DeicticAction({0.2, 0.2}, {1, 1}, kPi)), k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidates);
  }
}

TEST(Predict, FullFigureWinsWhenGestureCentersOnIt) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 10; ++trial) {
    const Scene s = generate_scene(rng.next(), 3);
    std::vector<Exemplar> ex;
    for (int id : s.piece_ids()) ex.push_back({"piece", std::to_string(id), piece_silhouette(s, id)});
    const ForegroundMap figure = subset_foreground(s, s.piece_ids());
    ex.push_back({"figure", "figure", figure});
    std::vector<Point2> cover;
    for (int id : s.piece_ids()) cover.push_back(mask_centroid(piece_silhouette(s, id)));
    Rng grng(rng.next());
    SynthOptions far;
    far.standoff_min = 6.0;
    far.standoff_max = 8.0;
    const GestureSequence g = single(
        aim_gesture(s.grid, mask_centroid(figure), cover, grng, GestureNoise{0, 0, 0.3, 0.6}, far));
    // Keep gestures whose footprint, after clipping to the grid, is centered on
    // the figure and covers every piece.
    const CandidateSet cs = fuse_gestures(s, g);
    if (cs.piece_ids.size() != 3 || distance(cs.region_centroid, mask_centroid(figure)) > 0.25) {
      continue;
    }
    const KnownObjects k = train(ex);
    if (!oracle::exemplar_exact(s, g, ex, k)) continue;
    std::vector<ForegroundMap> masks;
    for (const auto& e : ex) masks.push_back(e.mask);
    const auto expected = oracle::oracle_predict(s, g, masks);
    ASSERT_EQ(expected.piece_ids, s.piece_ids());
    const auto p = predict_foreground(s, g, k);
    EXPECT_EQ(p.label, "figure");
    EXPECT_EQ(p.piece_ids, expected.piece_ids);
    EXPECT_EQ(p.foreground, figure);
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(Predict, IsolatedExemplarsAreRecovered) {
  const Scene s = isolated_scene();
  const KnownObjects k = train(scene_exemplars(s));
  for (const Piece& piece : s.pieces) {
    const Point2 c = mask_centroid(piece_silhouette(s, piece.id));
    // Approach from the nearest grid edge so no other piece is in the way.
    const Point2 from = c.x < 8 ? Point2{0.05, c.y} : Point2{15.95, c.y};
    // Range chosen so the footprint centroid lands on the piece.
    const double range = sector_range_for_centroid(distance(from, c), 0.3);
    const auto p = predict_foreground(s, single(DeicticAction(from, c - from, 0.3, range)), k);
    EXPECT_EQ(p.piece_ids, std::vector<int>{piece.id});
    EXPECT_EQ(p.foreground, piece_silhouette(s, piece.id));
  }
}

TEST(Predict, OutputIsUnionOfPiecesAndDeterministic) {
  Rng rng(606);
  for (int trial = 0; trial < 15; ++trial) {
    const Scene s = generate_scene(rng.next(), 7);
    const KnownObjects k = train(scene_exemplars(s));
    GestureSequence g;
    for (int i = 0; i < 3; ++i) {
      const double dir = rng.uniform(0, 2 * kPi);
      g.append(DeicticAction({rng.uniform(0, 16), rng.uniform(0, 16)},
                             {std::cos(dir), std::sin(dir)}, rng.uniform(0.5, 2.0)),
               i);
    }
    try {
      const auto p = predict_foreground(s, g, k);
      EXPECT_EQ(p.foreground, subset_foreground(s, p.piece_ids));
      EXPECT_GT(p.score, 0.0);
      PredictConfig par;
      par.jobs = 3;
      EXPECT_EQ(predict_foreground(s, g, k, par), p);
      EXPECT_EQ(predict_foreground(s, g, k), p);
      EXPECT_EQ(predict_ranked(s, g, k, par), predict_ranked(s, g, k));
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kEmptyRegion || e.code() == ErrorCode::kNoCandidates);
    }
  }
}

TEST(CandidateHypotheses, CapPolicy) {
  const std::vector<int> ids = {5, 1, 3, 2};
  PredictConfig cfg;
  cfg.enumeration_cap = 3;
  EXPECT_EQ(candidate_hypotheses(ids, cfg),
            (std::vector<std::vector<int>>{{1}, {2}, {3}, {5}, {1, 2, 3, 5}}));
  cfg.cap_fallback = false;
  EXPECT_THROW(candidate_hypotheses(ids, cfg), EnumerationCapError);
  cfg.enumeration_cap = 4;
  EXPECT_EQ(candidate_hypotheses(ids, cfg).size(), 15u);
}
