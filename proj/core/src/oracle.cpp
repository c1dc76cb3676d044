#include "jgs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jgs/error.hpp"
#include "jgs/evaluation.hpp"
#include "jgs/foreground.hpp"
#include "jgs/rng.hpp"

namespace jgs::oracle {
namespace {

struct Footprint {
  bool any = false;
  Point2 centroid;
};

bool inside_cone(const ConeRegion& cone, Point2 p) {
  const double dx = p.x - cone.apex().x;
  const double dy = p.y - cone.apex().y;
  const double r = std::sqrt(dx * dx + dy * dy);
  if (r == 0.0) return true;
  if (r > cone.max_range()) return false;
  const double c = std::clamp((dx * cone.direction().x + dy * cone.direction().y) / r, -1.0, 1.0);
  return std::acos(c) <= cone.apex_angle() / 2.0;
}

Footprint footprint_of(const ConeRegion& cone, const GridSpec& g) {
  double sx = 0.0, sy = 0.0;
  long n = 0;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const Point2 p = g.pixel_center(col, row);
      if (!inside_cone(cone, p)) continue;
      sx += p.x;
      sy += p.y;
      ++n;
    }
  }
  if (n == 0) return {};
  return {true, {sx / n, sy / n}};
}

bool mask_centroid_of(const ForegroundMap& m, Point2& out) {
  double sx = 0.0, sy = 0.0;
  long n = 0;
  for (int row = 0; row < m.height(); ++row) {
    for (int col = 0; col < m.width(); ++col) {
      if (!m.at(col, row)) continue;
      const Point2 p = m.grid().pixel_center(col, row);
      sx += p.x;
      sy += p.y;
      ++n;
    }
  }
  if (n == 0) return false;
  out = {sx / n, sy / n};
  return true;
}

// Simpson's rule with recursive refinement.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

std::string describe_failures(std::size_t failures, std::size_t total) {
  std::ostringstream s;
  s << (total - failures) << "/" << total << " agree";
  return s.str();
}

}  // namespace

double oracle_nmse(const ForegroundMap& reported, const ForegroundMap& predicted) {
  if (!(reported.grid() == predicted.grid())) {
    throw Error(ErrorCode::kGridMismatch, "oracle nmse on different grids");
  }
  const int w = reported.width();
  const int h = reported.height();
  double sum = 0.0;
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < h; ++j) {
      const double d = (reported.at(i, j) ? 1.0 : 0.0) - (predicted.at(i, j) ? 1.0 : 0.0);
      sum += d * d;
    }
  }
  return (1.0 / (static_cast<double>(w) * static_cast<double>(h))) * std::sqrt(sum);
}

OraclePrediction oracle_predict(const Scene& scene, const GestureSequence& gestures,
                                std::span<const ForegroundMap> exemplar_masks, double softening) {
  const GridSpec& g = scene.grid;
  std::vector<ConeRegion> cones;
  std::vector<Point2> gesture_centers;
  for (const DeicticAction& a : gestures.actions()) {
    const ConeRegion cone = a.region(g);
    const Footprint f = footprint_of(cone, g);
    if (!f.any) continue;
    cones.push_back(cone);
    gesture_centers.push_back(f.centroid);
  }
  if (cones.empty()) throw Error(ErrorCode::kEmptyRegion, "oracle: no cone covers the grid");

  std::vector<int> candidates;
  std::vector<ForegroundMap> silhouettes;
  for (const Piece& p : scene.pieces) {
    ForegroundMap s = piece_silhouette(scene, p.id);
    Point2 c;
    if (!mask_centroid_of(s, c)) continue;
    const bool hit = std::any_of(cones.begin(), cones.end(),
                                 [&](const ConeRegion& cone) { return inside_cone(cone, c); });
    if (hit) {
      candidates.push_back(p.id);
      silhouettes.push_back(std::move(s));
    }
  }
  if (candidates.empty()) throw Error(ErrorCode::kEmptyRegion, "oracle: no piece in region");
  if (candidates.size() > 16) throw Error(ErrorCode::kInvalidArgument, "oracle: too many pieces");

  // Sort candidates so bit order matches ascending ids.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return candidates[a] < candidates[b]; });

  bool found = false;
  double best_score = 0.0;
  OraclePrediction best{{}, ForegroundMap(g)};
  const std::uint32_t k = static_cast<std::uint32_t>(candidates.size());
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    std::vector<int> ids;
    ForegroundMap mask(g);
    for (std::uint32_t i = 0; i < k; ++i) {
      if (!(bits & (1u << i))) continue;
      ids.push_back(candidates[order[i]]);
      mask |= silhouettes[order[i]];
    }
    const bool known = std::any_of(exemplar_masks.begin(), exemplar_masks.end(),
                                   [&](const ForegroundMap& e) { return e == mask; });
    if (!known) continue;
    Point2 cz;
    if (!mask_centroid_of(mask, cz)) continue;
    double score = 0.0;
    for (Point2 ca : gesture_centers) {
      score += 1.0 / (softening + std::sqrt((cz.x - ca.x) * (cz.x - ca.x) +
                                            (cz.y - ca.y) * (cz.y - ca.y)));
    }
    const bool earlier = ids.size() < best.piece_ids.size() ||
                         (ids.size() == best.piece_ids.size() && ids < best.piece_ids);
    if (!found || score > best_score || (score == best_score && earlier)) {
      found = true;
      best_score = score;
      best = {std::move(ids), std::move(mask)};
    }
  }
  if (!found) throw Error(ErrorCode::kNoCandidates, "oracle: no hypothesis matches an exemplar");
  return best;
}

double oracle_t_cdf(double t, double df, double tolerance) {
  if (!(df > 0.0)) throw Error(ErrorCode::kInvalidArgument, "df must be positive");
  if (t == 0.0) return 0.5;
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  auto density = [&](double x) {
    return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df));
  };
  const double b = std::abs(t);
  const double fa = density(0.0);
  const double fm = density(0.5 * b);
  const double fb = density(b);
  const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
  const double area = adaptive_simpson(density, 0.0, b, fa, fm, fb, whole, tolerance, 60);
  return t > 0.0 ? 0.5 + area : 0.5 - area;
}

bool exemplar_exact(const Scene& scene, const GestureSequence& gestures,
                    std::span<const Exemplar> exemplars, const KnownObjects& known) {
  std::vector<int> ids;
  try {
    ids = fuse_gestures(scene, gestures).piece_ids;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyRegion) return true;
    throw;
  }
  if (ids.size() > 16) return false;
  std::sort(ids.begin(), ids.end());
  const std::uint32_t k = static_cast<std::uint32_t>(ids.size());
  for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
    std::vector<int> subset;
    for (std::uint32_t i = 0; i < k; ++i) {
      if (bits & (1u << i)) subset.push_back(ids[i]);
    }
    const ForegroundMap mask = subset_foreground(scene, subset);
    const bool exact = std::any_of(exemplars.begin(), exemplars.end(),
                                   [&](const Exemplar& e) { return e.mask == mask; });
    bool accepted = false;
    if (!mask.empty()) {
      for (const Classification& c : classify(mask, known)) accepted = accepted || c.accepted;
    }
    if (exact != accepted) return false;
  }
  return true;
}

EquivalenceCase equivalence_case(std::uint64_t seed, int max_pieces) {
  EquivalenceCase out;
  for (std::uint64_t attempt = 0; attempt < 256; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    out.scene = generate_scene(rng.next(), rng.uniform_int(2, max_pieces));
    out.exemplars = scene_exemplars(out.scene);
    const PartLabel& part = out.scene.labels[rng.index(out.scene.labels.size())];
    const ForegroundMap target = subset_foreground(out.scene, part.piece_ids);
    std::vector<Point2> cover;
    for (int id : part.piece_ids) cover.push_back(mask_centroid(piece_silhouette(out.scene, id)));
    out.gestures = GestureSequence{};
    out.gestures.append(aim_gesture(out.scene.grid, mask_centroid(target), cover, rng), 0.0);
    if (exemplar_exact(out.scene, out.gestures, out.exemplars, train(out.exemplars))) return out;
    ++out.screened;
  }
  throw Error(ErrorCode::kInvalidArgument, "no exemplar-exact scene found for seed");
}

std::vector<CheckResult> run_checks(const std::string& suite) {
  const bool all = suite == "all";
  if (!all && suite != "nmse" && suite != "pipeline" && suite != "tcdf") {
    throw Error(ErrorCode::kInvalidArgument, "unknown oracle suite '" + suite + "'");
  }
  std::vector<CheckResult> results;

  if (all || suite == "nmse") {
    Rng rng(20240601);
    std::size_t failures = 0;
    const GridSpec grid{32, 32, {0, 0}, {32, 32}};
    for (int trial = 0; trial < 1000; ++trial) {
      ForegroundMap a(grid), b(grid);
      const double density = rng.uniform();
      for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
          a.set(c, r, rng.uniform() < density);
          b.set(c, r, rng.uniform() < density);
        }
      }
      if (std::abs(oracle_nmse(a, b) - nmse(a, b)) > 1e-12) ++failures;
    }
    results.push_back({"nmse", failures == 0, describe_failures(failures, 1000)});
  }

  if (all || suite == "tcdf") {
    Rng rng(424242);
    std::size_t failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const double df = 1.0 + rng.index(60);
      const double t = rng.uniform(-6.0, 6.0);
      if (std::abs(oracle_t_cdf(t, df) - student_t_cdf(t, df)) > 1e-8) ++failures;
    }
    results.push_back({"tcdf", failures == 0, describe_failures(failures, 200)});
  }

  if (all || suite == "pipeline") {
    std::size_t compared = 0;
    std::size_t failures = 0;
    std::size_t screened = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const EquivalenceCase c = equivalence_case(derive_seed(777, s));
      screened += c.screened;
      std::vector<ForegroundMap> masks;
      for (const Exemplar& e : c.exemplars) masks.push_back(e.mask);
      const KnownObjects known = train(c.exemplars);
      std::vector<int> fast;
      try {
        fast = predict_foreground(c.scene, c.gestures, known).piece_ids;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kEmptyRegion || e.code() == ErrorCode::kNoCandidates) continue;
        throw;
      }
      ++compared;
      try {
        if (oracle_predict(c.scene, c.gestures, masks).piece_ids != fast) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
    results.push_back({"pipeline", failures == 0 && compared > 0,
                       describe_failures(failures, compared) + " (non-abstaining, " +
                           std::to_string(screened) + " draws screened)"});
  }
  return results;
}

}  // namespace jgs::oracle
