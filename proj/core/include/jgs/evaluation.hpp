#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jgs/deixis.hpp"
#include "jgs/recognition.hpp"
#include "jgs/rng.hpp"
#include "jgs/scene.hpp"

namespace jgs {

/// Single/multiple gesture crossed with known/unknown goal.
enum class Condition { kSGKG, kMGKG, kSGUG, kMGUG };

inline constexpr std::array<Condition, 4> kAllConditions = {Condition::kSGKG, Condition::kMGKG,
                                                            Condition::kSGUG, Condition::kMGUG};

std::string_view condition_name(Condition c);
std::optional<Condition> parse_condition(std::string_view name);
inline bool is_multi_gesture(Condition c) { return c == Condition::kMGKG || c == Condition::kMGUG; }
inline bool is_known_goal(Condition c) { return c == Condition::kSGKG || c == Condition::kMGKG; }

/// One shower/observer episode.
struct DyadRecord {
  Scene scene;
  /// Where the scene was loaded from, if it was given by reference.
  std::string scene_path;
  Goal goal = Goal::pixel_level(ForegroundMap(GridSpec{}));
  GestureSequence gestures;
  Condition condition = Condition::kSGKG;

  /// Throws kSchemaViolation when the condition disagrees with the goal kind
  /// or the gesture count.
  void validate() const;
};

struct GestureNoise {
  double position_sigma = 0.25;   // scene units, per axis, on the hand position
  double direction_sigma = 0.05;  // radians
  double theta_min = 0.3;         // full apex angle range, radians
  double theta_max = 0.6;
};

struct SynthOptions {
  GridSpec grid{};
  int min_pieces = 3;
  int max_pieces = 7;
  int min_gestures_mg = 2;
  int max_gestures_mg = 4;
  /// Distance from the hand to the aimed point, scene units.
  double standoff_min = 2.0;
  double standoff_max = 4.0;
  /// Gaussian bump width range for unknown-goal blobs, scene units.
  double blob_sigma_min = 0.8;
  double blob_sigma_max = 1.6;
};

/// Synthetic stand-in for recorded dyads: `per_condition` records for each
/// of the four conditions, in condition order. Known goals are scene
/// labels; unknown goals are thresholded sums of Gaussian bumps placed on
/// the figure. Each gesture aims at the goal centroid from a random side,
/// with its range chosen so the cone footprint centers on the aimed point,
/// then perturbed by `noise`.
std::vector<DyadRecord> synth_dyads(std::uint64_t seed, int per_condition,
                                    const GestureNoise& noise = {},
                                    const SynthOptions& options = {});

/// One synthetic pointing gesture at `target`: the hand stands off on a
/// random side, the spread widens to cover every point in `cover`, the range
/// puts the footprint centroid on the target, then noise is applied.
DeicticAction aim_gesture(const GridSpec& grid, Point2 target, std::span<const Point2> cover,
                          Rng& rng, const GestureNoise& noise = {},
                          const SynthOptions& options = {});

/// Radius of a circular sector with the given full apex angle whose
/// centroid lies `distance` from the apex.
double sector_range_for_centroid(double distance, double apex_angle);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;

  friend bool operator==(const TTestResult&, const TTestResult&) = default;
};

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);
/// Student's t cumulative distribution.
double student_t_cdf(double t, double df);

/// Two-sample, two-tailed test. Pooled variance (Student) by default,
/// Welch on request. Throws kInvalidArgument when a sample has fewer than
/// two values. Zero variance: equal means give t = 0, p = 1; different
/// means give t = +/-inf, p = 0.
TTestResult t_test(std::span<const double> a, std::span<const double> b, bool welch = false);

struct ConditionStats {
  Condition condition = Condition::kSGKG;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t abstentions = 0;

  friend bool operator==(const ConditionStats&, const ConditionStats&) = default;
};

struct PairwiseTest {
  std::string a;
  std::string b;
  TTestResult result;

  friend bool operator==(const PairwiseTest&, const PairwiseTest&) = default;
};

struct EvalReport {
  bool welch = false;
  std::vector<ConditionStats> conditions;
  /// Upper triangle over the conditions present, in condition order.
  std::vector<PairwiseTest> pairwise;
  /// Known goals (SGKG+MGKG) against unknown goals (SGUG+MGUG).
  std::optional<PairwiseTest> known_vs_unknown;

  const ConditionStats* find(Condition c) const;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct RecordScore {
  double nmse = 0.0;
  bool abstained = false;
};

struct EvalOptions {
  PredictConfig predict;
  /// Records scored concurrently; output does not depend on it.
  int jobs = 1;
  bool welch = false;
};

/// Prediction vs goal for one record; abstentions are scored against an
/// all-zero prediction.
RecordScore score_record(const DyadRecord& record, const KnownObjects& known,
                         const PredictConfig& cfg = {});
std::vector<RecordScore> score_records(std::span<const DyadRecord> records,
                                       const KnownObjects& known, const EvalOptions& options = {});

/// Aggregates per-record scores into per-condition statistics and tests.
EvalReport summarize(std::span<const DyadRecord> records, std::span<const RecordScore> scores,
                     bool welch = false);

EvalReport evaluate(std::span<const DyadRecord> records, const KnownObjects& known,
                    const EvalOptions& options = {});

/// Exemplars for every labeled part of every record's scene.
std::vector<Exemplar> dataset_exemplars(std::span<const DyadRecord> records);

enum class ReportFormat { kText, kJson, kCsv };
std::optional<ReportFormat> parse_report_format(std::string_view name);

std::string emit_report(const EvalReport& report, ReportFormat format);

}  // namespace jgs
