#include "jgs/json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"

namespace jgs {
namespace {

// Wraps library exceptions for missing keys and wrong types.
template <typename Fn>
auto schema(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string(what) + ": " + e.what());
  }
}

Json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double number_or_inf_from(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorCode::kSchemaViolation, "expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

Json part_to_json(const PartLabel& part) {
  return {{"label", part.label}, {"piece_ids", part.piece_ids}};
}

PartLabel part_from_json(const Json& j) {
  PartLabel part{j.at("label").get<std::string>(), j.at("piece_ids").get<std::vector<int>>()};
  std::sort(part.piece_ids.begin(), part.piece_ids.end());
  part.piece_ids.erase(std::unique(part.piece_ids.begin(), part.piece_ids.end()),
                       part.piece_ids.end());
  return part;
}

Json test_to_json(const PairwiseTest& t) {
  return {{"a", t.a},
          {"b", t.b},
          {"t", number_or_inf(t.result.t)},
          {"df", t.result.df},
          {"p", t.result.p}};
}

PairwiseTest test_from_json(const Json& j) {
  return {j.at("a").get<std::string>(), j.at("b").get<std::string>(),
          {number_or_inf_from(j.at("t")), j.at("df").get<double>(), j.at("p").get<double>()}};
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what());
  }
}

std::string dump_json(const Json& j, int indent) { return j.dump(indent); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

Json grid_to_json(const GridSpec& grid) {
  return {{"w", grid.width},
          {"h", grid.height},
          {"rect", {grid.min.x, grid.min.y, grid.max.x, grid.max.y}}};
}

GridSpec grid_from_json(const Json& j) {
  GridSpec g = schema("grid", [&] {
    const auto rect = j.at("rect").get<std::vector<double>>();
    if (rect.size() != 4) throw Error(ErrorCode::kSchemaViolation, "grid rect needs 4 numbers");
    return GridSpec{j.at("w").get<int>(), j.at("h").get<int>(), {rect[0], rect[1]},
                    {rect[2], rect[3]}};
  });
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaViolation, e.what());
  }
  return g;
}

Json mask_to_json(const ForegroundMap& mask) {
  return {{"w", mask.width()}, {"h", mask.height()}, {"rle", rle_encode(mask)}};
}

ForegroundMap mask_from_json(const Json& j, const GridSpec& grid) {
  const auto [w, h, runs] = schema("mask", [&] {
    return std::make_tuple(j.at("w").get<int>(), j.at("h").get<int>(),
                           j.at("rle").get<std::vector<std::uint32_t>>());
  });
  if (w != grid.width || h != grid.height) {
    throw Error(ErrorCode::kGridMismatch, "mask is " + std::to_string(w) + "x" +
                                              std::to_string(h) + ", grid is " +
                                              std::to_string(grid.width) + "x" +
                                              std::to_string(grid.height));
  }
  return rle_decode(grid, runs);
}

Json goal_to_json(const Goal& goal) {
  if (goal.kind() == GoalKind::kObjectLevel) {
    Json j = part_to_json(goal.part());
    j["kind"] = "object-level";
    return j;
  }
  return {{"kind", "pixel-level"}, {"mask", mask_to_json(goal.mask())}};
}

Goal goal_from_json(const Json& j, const GridSpec& grid) {
  const std::string kind = schema("goal", [&] { return j.at("kind").get<std::string>(); });
  if (kind == "object-level") return Goal::object_level(schema("goal", [&] { return part_from_json(j); }));
  if (kind == "pixel-level") return Goal::pixel_level(mask_from_json(schema("goal", [&] { return j.at("mask"); }), grid));
  throw Error(ErrorCode::kSchemaViolation, "unknown goal kind '" + kind + "'");
}

Json scene_to_json(const Scene& scene) {
  Json pieces = Json::array();
  for (const Piece& p : scene.pieces) {
    pieces.push_back({{"id", p.id},
                      {"kind", std::string(piece_kind_name(p.kind))},
                      {"pose",
                       {{"tx", p.pose.translation().x},
                        {"ty", p.pose.translation().y},
                        {"rot", p.pose.rotation()},
                        {"mirrored", p.pose.mirrored()}}}});
  }
  Json labels = Json::array();
  for (const PartLabel& l : scene.labels) labels.push_back(part_to_json(l));
  Json goals = Json::array();
  for (const Goal& g : scene.goals) goals.push_back(goal_to_json(g));
  return {{"figure_name", scene.figure_name},
          {"grid", grid_to_json(scene.grid)},
          {"pieces", pieces},
          {"labels", labels},
          {"goals", goals}};
}

Scene scene_from_json(const Json& j, std::size_t max_pieces) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "scene must be a JSON object");
  Scene scene;
  scene.figure_name = schema("scene", [&] { return j.value("figure_name", std::string()); });
  scene.grid = grid_from_json(schema("scene", [&] { return j.at("grid"); }));
  schema("scene pieces", [&] {
    for (const Json& p : j.at("pieces")) {
      const std::string kind_name = p.at("kind").get<std::string>();
      const auto kind = parse_piece_kind(kind_name);
      if (!kind) throw Error(ErrorCode::kUnknownPieceKind, "unknown piece kind '" + kind_name + "'");
      const Json& pose = p.at("pose");
      scene.pieces.push_back({p.at("id").get<int>(), *kind,
                              Pose({pose.at("tx").get<double>(), pose.at("ty").get<double>()},
                                   pose.at("rot").get<double>(), pose.value("mirrored", false))});
    }
    if (j.contains("labels")) {
      for (const Json& l : j.at("labels")) scene.labels.push_back(part_from_json(l));
    }
    return 0;
  });
  if (j.contains("goals")) {
    for (const Json& g : j.at("goals")) scene.goals.push_back(goal_from_json(g, scene.grid));
  }
  scene.validate(max_pieces);
  return scene;
}

Json gesture_to_json(const DeicticAction& action, double t) {
  Json j = {{"x", action.origin().x},
            {"y", action.origin().y},
            {"dx", action.direction().x},
            {"dy", action.direction().y},
            {"theta_rad", action.apex_angle()}};
  if (action.max_range()) j["max_range"] = *action.max_range();
  j["t"] = t;
  return j;
}

std::pair<DeicticAction, std::optional<double>> gesture_from_json(const Json& j) {
  struct Raw {
    Point2 origin, direction;
    double theta;
    std::optional<double> range, t;
  };
  const Raw raw = schema("gesture", [&] {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "gesture must be an object");
    Raw r{{j.at("x").get<double>(), j.at("y").get<double>()},
          {j.at("dx").get<double>(), j.at("dy").get<double>()},
          j.at("theta_rad").get<double>(),
          std::nullopt,
          std::nullopt};
    if (j.contains("max_range") && !j.at("max_range").is_null()) r.range = j.at("max_range").get<double>();
    if (j.contains("t") && !j.at("t").is_null()) r.t = j.at("t").get<double>();
    return r;
  });
  try {
    return {DeicticAction(raw.origin, raw.direction, raw.theta, raw.range), raw.t};
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("gesture: ") + e.what());
  }
}

Json gestures_to_json(const GestureSequence& gestures) {
  Json out = Json::array();
  for (std::size_t i = 0; i < gestures.size(); ++i) {
    out.push_back(gesture_to_json(gestures.actions()[i], gestures.timestamps()[i]));
  }
  return out;
}

GestureSequence gestures_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kSchemaViolation, "gestures must be a non-empty array");
  }
  GestureSequence seq;
  for (const Json& g : j) {
    auto [action, t] = gesture_from_json(g);
    const double when = t.value_or(seq.empty() ? 0.0 : seq.timestamps().back() + 1.0);
    try {
      seq.append(action, when);
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaViolation, e.what());
    }
  }
  return seq;
}

Json hog_config_to_json(const HogConfig& cfg) {
  return {{"window", cfg.window}, {"cell", cfg.cell},   {"block", cfg.block},
          {"block_stride", cfg.block_stride}, {"bins", cfg.bins}, {"clip", cfg.clip}};
}

HogConfig hog_config_from_json(const Json& j) {
  return schema("hog config", [&] {
    HogConfig cfg;
    cfg.window = j.value("window", cfg.window);
    cfg.cell = j.value("cell", cfg.cell);
    cfg.block = j.value("block", cfg.block);
    cfg.block_stride = j.value("block_stride", cfg.block_stride);
    cfg.bins = j.value("bins", cfg.bins);
    cfg.clip = j.value("clip", cfg.clip);
    return cfg;
  });
}

Json model_to_json(const KnownObjects& known) {
  Json entries = Json::array();
  for (const KnownObject& e : known.entries()) {
    entries.push_back({{"label", e.label}, {"threshold", e.threshold}, {"centroid", e.centroid}});
  }
  if (known.config() == HogConfig{}) return entries;
  return {{"hog", hog_config_to_json(known.config())}, {"entries", entries}};
}

KnownObjects model_from_json(const Json& j) {
  HogConfig cfg;
  const Json* entries = &j;
  if (j.is_object()) {
    cfg = hog_config_from_json(schema("model", [&] { return j.at("hog"); }));
    entries = &schema("model", [&]() -> const Json& { return j.at("entries"); });
  }
  if (!entries->is_array()) throw Error(ErrorCode::kSchemaViolation, "model entries must be an array");
  std::vector<KnownObject> out = schema("model", [&] {
    std::vector<KnownObject> v;
    for (const Json& e : *entries) {
      v.push_back({e.at("label").get<std::string>(), e.at("centroid").get<std::vector<double>>(),
                   e.at("threshold").get<double>()});
    }
    return v;
  });
  try {
    return KnownObjects(std::move(out), cfg);
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaViolation, e.what());
  }
}

Json prediction_to_json(const RankedPrediction& prediction) {
  return {{"label", prediction.label},
          {"score", prediction.score},
          {"entry", prediction.entry},
          {"piece_ids", prediction.piece_ids},
          {"centroid", {prediction.centroid.x, prediction.centroid.y}},
          {"foreground", mask_to_json(prediction.foreground)}};
}

Json record_to_json(const DyadRecord& record, bool inline_scenes) {
  Json j = {{"condition", std::string(condition_name(record.condition))}};
  if (!inline_scenes && !record.scene_path.empty()) {
    j["scene_path"] = record.scene_path;
  } else {
    j["scene"] = scene_to_json(record.scene);
  }
  j["goal"] = goal_to_json(record.goal);
  j["gestures"] = gestures_to_json(record.gestures);
  return j;
}

DyadRecord record_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "record must be an object");
  DyadRecord r;
  const std::string cond = schema("record", [&] { return j.at("condition").get<std::string>(); });
  const auto c = parse_condition(cond);
  if (!c) throw Error(ErrorCode::kSchemaViolation, "unknown condition '" + cond + "'");
  r.condition = *c;
  if (j.contains("scene")) {
    r.scene = scene_from_json(j.at("scene"));
  } else {
    r.scene_path = schema("record", [&] { return j.at("scene_path").get<std::string>(); });
    std::filesystem::path p(r.scene_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    r.scene = load_scene(p.string());
  }
  r.goal = goal_from_json(schema("record", [&] { return j.at("goal"); }), r.scene.grid);
  r.gestures = gestures_from_json(schema("record", [&] { return j.at("gestures"); }));
  r.validate();
  return r;
}

Json dataset_to_json(const std::vector<DyadRecord>& records, bool inline_scenes) {
  Json out = Json::array();
  for (const DyadRecord& r : records) out.push_back(record_to_json(r, inline_scenes));
  return out;
}

std::vector<DyadRecord> dataset_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaViolation, "dataset must be a JSON array");
  std::vector<DyadRecord> out;
  out.reserve(j.size());
  for (const Json& r : j) out.push_back(record_from_json(r, base_dir));
  return out;
}

Json report_to_json(const EvalReport& report) {
  Json conditions = Json::array();
  for (const ConditionStats& s : report.conditions) {
    conditions.push_back({{"condition", std::string(condition_name(s.condition))},
                          {"n", s.n},
                          {"mean_nmse", s.mean},
                          {"std_nmse", s.stddev},
                          {"abstentions", s.abstentions}});
  }
  Json pairwise = Json::array();
  for (const PairwiseTest& t : report.pairwise) pairwise.push_back(test_to_json(t));
  return {{"test", report.welch ? "welch" : "student"},
          {"conditions", conditions},
          {"pairwise", pairwise},
          {"kg_vs_ug", report.known_vs_unknown ? test_to_json(*report.known_vs_unknown)
                                               : Json(nullptr)}};
}

EvalReport report_from_json(const Json& j) {
  return schema("report", [&] {
    EvalReport r;
    r.welch = j.at("test").get<std::string>() == "welch";
    for (const Json& s : j.at("conditions")) {
      const auto c = parse_condition(s.at("condition").get<std::string>());
      if (!c) throw Error(ErrorCode::kSchemaViolation, "unknown condition in report");
      r.conditions.push_back({*c, s.at("n").get<std::size_t>(), s.at("mean_nmse").get<double>(),
                              s.at("std_nmse").get<double>(),
                              s.at("abstentions").get<std::size_t>()});
    }
    for (const Json& t : j.at("pairwise")) r.pairwise.push_back(test_from_json(t));
    if (j.contains("kg_vs_ug") && !j.at("kg_vs_ug").is_null()) {
      r.known_vs_unknown = test_from_json(j.at("kg_vs_ug"));
    }
    return r;
  });
}

}  // namespace jgs
