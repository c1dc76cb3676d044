#include "jgs/scene.hpp"

#include <algorithm>
#include <limits>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "jgs/error.hpp"
#include "jgs/json.hpp"
#include "jgs/rng.hpp"

namespace jgs {
namespace {

struct KindInfo {
  PieceKind kind;
  std::string_view name;
  std::string_view family;
};

constexpr std::array<KindInfo, 7> kKindInfo = {{
    {PieceKind::kLargeTriangleA, "large-triangle-A", "large-triangle"},
    {PieceKind::kLargeTriangleB, "large-triangle-B", "large-triangle"},
    {PieceKind::kMediumTriangle, "medium-triangle", "medium-triangle"},
    {PieceKind::kSmallTriangleA, "small-triangle-A", "small-triangle"},
    {PieceKind::kSmallTriangleB, "small-triangle-B", "small-triangle"},
    {PieceKind::kSquare, "square", "square"},
    {PieceKind::kParallelogram, "parallelogram", "parallelogram"},
}};

const KindInfo& info(PieceKind kind) { return kKindInfo[static_cast<std::size_t>(kind)]; }

}  // namespace

std::string_view piece_kind_name(PieceKind kind) { return info(kind).name; }
std::string_view piece_family(PieceKind kind) { return info(kind).family; }

std::optional<PieceKind> parse_piece_kind(std::string_view name) {
  for (const KindInfo& k : kKindInfo) {
    if (k.name == name) return k.kind;
  }
  return std::nullopt;
}

const Polygon& canonical_polygon(PieceKind kind) {
  // Dissection of the 4x4 square.
  static const std::array<Polygon, 7> kPolygons = {
      Polygon({{0, 0}, {4, 0}, {2, 2}}),
      Polygon({{0, 0}, {2, 2}, {0, 4}}),
      Polygon({{4, 2}, {4, 4}, {2, 4}}),
      Polygon({{2, 2}, {3, 3}, {1, 3}}),
      Polygon({{3, 1}, {4, 0}, {4, 2}}),
      Polygon({{2, 2}, {3, 1}, {4, 2}, {3, 3}}),
      Polygon({{0, 4}, {1, 3}, {3, 3}, {2, 4}}),
  };
  return kPolygons[static_cast<std::size_t>(kind)];
}

Goal Goal::object_level(PartLabel part) {
  std::sort(part.piece_ids.begin(), part.piece_ids.end());
  part.piece_ids.erase(std::unique(part.piece_ids.begin(), part.piece_ids.end()),
                       part.piece_ids.end());
  return Goal(std::move(part));
}

Goal Goal::pixel_level(ForegroundMap mask) { return Goal(std::move(mask)); }

void Scene::validate(std::size_t max_pieces) const {
  grid.validate();
  if (pieces.empty() || pieces.size() > max_pieces) {
    throw Error(ErrorCode::kSchemaViolation,
                "scene must hold between 1 and " + std::to_string(max_pieces) + " pieces, got " +
                    std::to_string(pieces.size()));
  }
  std::set<int> ids;
  for (const Piece& p : pieces) {
    if (!ids.insert(p.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate piece id " + std::to_string(p.id));
    }
  }
  auto check_part = [&](const PartLabel& part) {
    if (part.piece_ids.empty()) {
      throw Error(ErrorCode::kSchemaViolation, "label '" + part.label + "' has no pieces");
    }
    for (int id : part.piece_ids) {
      if (!ids.count(id)) {
        throw Error(ErrorCode::kUnknownId,
                    "label '" + part.label + "' refers to unknown piece " + std::to_string(id));
      }
    }
  };
  for (const PartLabel& part : labels) check_part(part);
  for (const Goal& goal : goals) {
    if (goal.kind() == GoalKind::kObjectLevel) {
      check_part(goal.part());
    } else if (!(goal.mask().grid() == grid)) {
      throw Error(ErrorCode::kGridMismatch, "pixel-level goal grid differs from scene grid");
    }
  }
}

const Piece& Scene::piece(int id) const {
  for (const Piece& p : pieces) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::kUnknownId, "no piece with id " + std::to_string(id));
}

bool Scene::has_piece(int id) const {
  return std::any_of(pieces.begin(), pieces.end(), [id](const Piece& p) { return p.id == id; });
}

std::vector<int> Scene::piece_ids() const {
  std::vector<int> ids;
  ids.reserve(pieces.size());
  for (const Piece& p : pieces) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ForegroundMap piece_silhouette(const Scene& scene, int id) {
  const Polygon poly = scene.piece(id).polygon();
  return rasterize(std::span<const Polygon>(&poly, 1), scene.grid);
}

ForegroundMap subset_foreground(const Scene& scene, std::span<const int> ids) {
  std::vector<Polygon> polys;
  polys.reserve(ids.size());
  for (int id : ids) polys.push_back(scene.piece(id).polygon());
  return rasterize(polys, scene.grid);
}

ForegroundMap goal_mask(const Scene& scene, const Goal& goal) {
  if (goal.kind() == GoalKind::kPixelLevel) return goal.mask();
  return subset_foreground(scene, goal.part().piece_ids);
}

std::vector<std::pair<int, int>> overlapping_pairs(const Scene& scene) {
  std::vector<ForegroundMap> masks;
  masks.reserve(scene.pieces.size());
  for (const Piece& p : scene.pieces) masks.push_back(piece_silhouette(scene, p.id));
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (std::size_t j = i + 1; j < masks.size(); ++j) {
      const auto a = masks[i].bits();
      const auto b = masks[j].bits();
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] && b[k]) {
          out.emplace_back(scene.pieces[i].id, scene.pieces[j].id);
          break;
        }
      }
    }
  }
  return out;
}

Scene load_scene(const std::string& path, std::vector<std::string>* warnings,
                 std::size_t max_pieces) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scene file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scene scene = scene_from_json(parse_json(buffer.str()), max_pieces);
  if (warnings) {
    for (const auto& [a, b] : overlapping_pairs(scene)) {
      warnings->push_back(path + ": pieces " + std::to_string(a) + " and " + std::to_string(b) +
                          " overlap");
    }
  }
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write scene file '" + path + "'");
  out << dump_json(scene_to_json(scene)) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing scene file '" + path + "'");
}

Scene generate_scene(std::uint64_t seed, int piece_count, const SceneGenOptions& options) {
  if (piece_count < 1 || piece_count > static_cast<int>(kMaxTangramPieces)) {
    throw Error(ErrorCode::kInvalidArgument,
                "piece count must be in [1, 7], got " + std::to_string(piece_count));
  }
  const GridSpec& grid = options.grid;
  grid.validate();
  Rng rng(seed);

  std::vector<PieceKind> kinds(kAllPieceKinds.begin(), kAllPieceKinds.end());
  for (std::size_t i = kinds.size() - 1; i > 0; --i) {
    std::swap(kinds[i], kinds[rng.index(i + 1)]);
  }

  Scene scene;
  scene.figure_name = "synthetic-" + std::to_string(seed);
  scene.grid = grid;
  ForegroundMap occupied(grid);
  for (int n = 0; n < piece_count; ++n) {
    const PieceKind kind = kinds[static_cast<std::size_t>(n)];
    bool placed = false;
    for (int attempt = 0; attempt < options.max_attempts_per_piece && !placed; ++attempt) {
      const double rotation = rng.uniform_int(0, 7) * (std::numbers::pi / 4.0);
      const bool mirrored = rng.coin();
      const Polygon local = apply_pose(canonical_polygon(kind), Pose({0, 0}, rotation, mirrored));
      double x0 = local.vertices()[0].x, x1 = x0, y0 = local.vertices()[0].y, y1 = y0;
      for (Point2 v : local.vertices()) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
      }
      const double lo_x = grid.min.x + options.margin - x0;
      const double hi_x = grid.max.x - options.margin - x1;
      const double lo_y = grid.min.y + options.margin - y0;
      const double hi_y = grid.max.y - options.margin - y1;
      if (hi_x < lo_x || hi_y < lo_y) continue;
      const Point2 t{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
      Piece piece{n + 1, kind, Pose(t, rotation, mirrored)};
      const Polygon posed = piece.polygon();
      const ForegroundMap mask = rasterize(std::span<const Polygon>(&posed, 1), grid);
      bool clash = mask.empty();
      const auto a = mask.bits();
      const auto b = occupied.bits();
      for (std::size_t k = 0; k < a.size() && !clash; ++k) clash = a[k] && b[k];
      if (clash) continue;
      occupied |= mask;
      scene.pieces.push_back(piece);
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::kPlacementFailed,
                  "could not place piece " + std::to_string(n + 1) + " of " +
                      std::to_string(piece_count) + " (seed " + std::to_string(seed) + ")");
    }
  }

  for (const Piece& p : scene.pieces) {
    scene.labels.push_back({std::string(piece_family(p.kind)), {p.id}});
  }
  if (piece_count >= 3) {
    std::vector<Point2> centers;
    for (const Piece& p : scene.pieces) centers.push_back(polygon_centroid(p.polygon()));
    std::size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      for (std::size_t j = i + 1; j < centers.size(); ++j) {
        const double d = distance(centers[i], centers[j]);
        if (d < best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    scene.labels.push_back({"pair", {scene.pieces[best_i].id, scene.pieces[best_j].id}});
  }
  if (piece_count >= 2) scene.labels.push_back({"figure", scene.piece_ids()});
  return scene;
}

}  // namespace jgs
