#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jgs/geometry.hpp"

namespace jgs {

enum class PieceKind {
  kLargeTriangleA,
  kLargeTriangleB,
  kMediumTriangle,
  kSmallTriangleA,
  kSmallTriangleB,
  kSquare,
  kParallelogram,
};

inline constexpr std::array<PieceKind, 7> kAllPieceKinds = {
    PieceKind::kLargeTriangleA, PieceKind::kLargeTriangleB, PieceKind::kMediumTriangle,
    PieceKind::kSmallTriangleA, PieceKind::kSmallTriangleB, PieceKind::kSquare,
    PieceKind::kParallelogram,
};

/// File-format name, e.g. "large-triangle-A".
std::string_view piece_kind_name(PieceKind kind);
std::optional<PieceKind> parse_piece_kind(std::string_view name);
/// Shape family shared by congruent kinds, e.g. "large-triangle".
std::string_view piece_family(PieceKind kind);

/// Piece outline in local coordinates. With identity poses the seven pieces
/// tile the square [0,4]x[0,4] exactly; all vertices are integers.
const Polygon& canonical_polygon(PieceKind kind);

struct Piece {
  int id = 0;
  PieceKind kind = PieceKind::kSquare;
  Pose pose;

  Polygon polygon() const { return apply_pose(canonical_polygon(kind), pose); }

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// A named group of pieces (a part or the whole figure).
struct PartLabel {
  std::string label;
  std::vector<int> piece_ids;  // sorted, unique

  friend bool operator==(const PartLabel&, const PartLabel&) = default;
};

enum class GoalKind { kObjectLevel, kPixelLevel };

/// What the shower wants the observer to attend to: either a labeled part
/// (known goal) or a free pixel region (unknown goal).
class Goal {
 public:
  static Goal object_level(PartLabel part);
  static Goal pixel_level(ForegroundMap mask);

  GoalKind kind() const {
    return std::holds_alternative<PartLabel>(payload_) ? GoalKind::kObjectLevel
                                                       : GoalKind::kPixelLevel;
  }
  const PartLabel& part() const { return std::get<PartLabel>(payload_); }
  const ForegroundMap& mask() const { return std::get<ForegroundMap>(payload_); }

  friend bool operator==(const Goal&, const Goal&) = default;

 private:
  explicit Goal(std::variant<PartLabel, ForegroundMap> payload) : payload_(std::move(payload)) {}

  std::variant<PartLabel, ForegroundMap> payload_;
};

inline constexpr std::size_t kMaxTangramPieces = 7;

struct Scene {
  std::string figure_name;
  GridSpec grid;
  std::vector<Piece> pieces;
  std::vector<PartLabel> labels;
  std::vector<Goal> goals;

  /// Checks piece count bounds, id uniqueness, label/goal references, and
  /// goal grids. Throws kDuplicateId, kUnknownId, kGridMismatch or
  /// kSchemaViolation.
  void validate(std::size_t max_pieces = kMaxTangramPieces) const;

  const Piece& piece(int id) const;
  bool has_piece(int id) const;
  std::vector<int> piece_ids() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Rasterization of one posed piece on the scene grid. Throws kUnknownId.
ForegroundMap piece_silhouette(const Scene& scene, int id);

/// Union of the member silhouettes; empty ids give an all-zero map.
ForegroundMap subset_foreground(const Scene& scene, std::span<const int> ids);

/// Target mask of a goal: the part's pieces for object-level goals.
ForegroundMap goal_mask(const Scene& scene, const Goal& goal);

/// Pairs of piece ids whose silhouettes share at least one pixel.
std::vector<std::pair<int, int>> overlapping_pairs(const Scene& scene);

/// Reads a scene file. Overlapping pieces are accepted; a note is appended
/// to `warnings` for each overlapping pair when provided.
Scene load_scene(const std::string& path, std::vector<std::string>* warnings = nullptr,
                 std::size_t max_pieces = kMaxTangramPieces);
void save_scene(const Scene& scene, const std::string& path);

struct SceneGenOptions {
  GridSpec grid{};
  int max_attempts_per_piece = 500;
  /// Keep posed pieces this far (scene units) inside the rectangle.
  double margin = 0.25;
};

/// Random non-overlapping placement of `piece_count` distinct kinds, with
/// rotations in multiples of 45 degrees. Labels: one per piece (its shape
/// family), "pair" for the two closest pieces, "figure" for all pieces.
/// Throws kInvalidArgument for a count outside [1, 7] and kPlacementFailed
/// when rejection sampling runs out of attempts.
Scene generate_scene(std::uint64_t seed, int piece_count, const SceneGenOptions& options = {});

}  // namespace jgs
