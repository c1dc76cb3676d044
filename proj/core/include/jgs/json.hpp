#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jgs/deixis.hpp"
#include "jgs/evaluation.hpp"
#include "jgs/recognition.hpp"
#include "jgs/scene.hpp"

// JSON wire formats shared by files, the CLI and the HTTP API. Parsing
// failures map to kMalformedJson; well-formed documents with missing or
// mistyped fields map to kSchemaViolation.
namespace jgs {

using Json = nlohmann::json;

Json parse_json(const std::string& text);
std::string dump_json(const Json& j, int indent = 2);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const Json& j);

/// {w, h, rle}; the scene rectangle comes from `grid`, whose dimensions must
/// match (kGridMismatch otherwise).
Json mask_to_json(const ForegroundMap& mask);
ForegroundMap mask_from_json(const Json& j, const GridSpec& grid);

Json goal_to_json(const Goal& goal);
Goal goal_from_json(const Json& j, const GridSpec& grid);

Json scene_to_json(const Scene& scene);
/// Also validates the scene.
Scene scene_from_json(const Json& j, std::size_t max_pieces = kMaxTangramPieces);

/// {x, y, dx, dy, theta_rad, max_range?, t}
Json gesture_to_json(const DeicticAction& action, double t);
std::pair<DeicticAction, std::optional<double>> gesture_from_json(const Json& j);
Json gestures_to_json(const GestureSequence& gestures);
GestureSequence gestures_from_json(const Json& j);

Json hog_config_to_json(const HogConfig& cfg);
HogConfig hog_config_from_json(const Json& j);

/// Top-level array [{label, threshold, centroid}] for the default HOG
/// layout; {hog, entries} otherwise. Both are accepted on input.
Json model_to_json(const KnownObjects& known);
KnownObjects model_from_json(const Json& j);

Json prediction_to_json(const RankedPrediction& prediction);

/// Records embed their scene unless `scene_path` is set and `inline_scenes`
/// is false.
Json record_to_json(const DyadRecord& record, bool inline_scenes = true);
/// Relative `scene_path` references resolve against `base_dir`.
DyadRecord record_from_json(const Json& j, const std::string& base_dir = ".");
Json dataset_to_json(const std::vector<DyadRecord>& records, bool inline_scenes = true);
std::vector<DyadRecord> dataset_from_json(const Json& j, const std::string& base_dir = ".");

Json report_to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);

}  // namespace jgs
