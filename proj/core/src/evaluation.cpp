#include "jgs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"
#include "jgs/json.hpp"
#include "jgs/rng.hpp"
#include "parallel.hpp"

namespace jgs {
namespace {

constexpr std::array<std::string_view, 4> kConditionNames = {"SGKG", "MGKG", "SGUG", "MGUG"};

Point2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

ForegroundMap blob_goal(const Scene& scene, Rng& rng, const SynthOptions& opt) {
  const GridSpec& g = scene.grid;
  const int bumps = rng.uniform_int(1, 3);
  std::vector<Point2> centers;
  std::vector<double> sigmas;
  for (int k = 0; k < bumps; ++k) {
    const Piece& anchor = scene.pieces[rng.index(scene.pieces.size())];
    Point2 c = polygon_centroid(anchor.polygon());
    c.x = std::clamp(rng.normal(c.x, 1.0), g.min.x, g.max.x);
    c.y = std::clamp(rng.normal(c.y, 1.0), g.min.y, g.max.y);
    centers.push_back(c);
    sigmas.push_back(rng.uniform(opt.blob_sigma_min, opt.blob_sigma_max));
  }
  SalienceMap salience(g);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const Point2 p = g.pixel_center(col, row);
      double v = 0.0;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const Point2 d = p - centers[k];
        v += std::exp(-dot(d, d) / (2.0 * sigmas[k] * sigmas[k]));
      }
      salience.set(col, row, v);
    }
  }
  return threshold(salience, 0.5);
}

GestureSequence synth_gestures(const Scene& scene, const ForegroundMap& goal_mask,
                               const std::vector<Point2>& goal_piece_centers, int count,
                               Rng& rng, const GestureNoise& noise, const SynthOptions& opt) {
  const Point2 target = mask_centroid(goal_mask);
  GestureSequence out;
  double t = 0.0;
  for (int k = 0; k < count; ++k) {
    out.append(aim_gesture(scene.grid, target, goal_piece_centers, rng, noise, opt), t);
    t += rng.uniform(0.5, 2.0);
  }
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p=%.4g", p);
  return buf;
}

std::string format_fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string_view condition_name(Condition c) { return kConditionNames[static_cast<std::size_t>(c)]; }

std::optional<Condition> parse_condition(std::string_view name) {
  for (std::size_t i = 0; i < kConditionNames.size(); ++i) {
    if (kConditionNames[i] == name) return kAllConditions[i];
  }
  return std::nullopt;
}

void DyadRecord::validate() const {
  scene.validate();
  if (gestures.empty()) throw Error(ErrorCode::kSchemaViolation, "record has no gestures");
  if (is_multi_gesture(condition) != (gestures.size() > 1)) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("condition ") + std::string(condition_name(condition)) +
                    " disagrees with gesture count " + std::to_string(gestures.size()));
  }
  if (is_known_goal(condition) != (goal.kind() == GoalKind::kObjectLevel)) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string("condition ") + std::string(condition_name(condition)) +
                    " disagrees with the goal kind");
  }
  if (goal.kind() == GoalKind::kPixelLevel && !(goal.mask().grid() == scene.grid)) {
    throw Error(ErrorCode::kGridMismatch, "goal mask grid differs from scene grid");
  }
  if (goal.kind() == GoalKind::kObjectLevel) {
    for (int id : goal.part().piece_ids) {
      if (!scene.has_piece(id)) {
        throw Error(ErrorCode::kUnknownId, "goal refers to unknown piece " + std::to_string(id));
      }
    }
  }
}

DeicticAction aim_gesture(const GridSpec& g, Point2 target, std::span<const Point2> cover,
                          Rng& rng, const GestureNoise& noise, const SynthOptions& opt) {
  double heading = 0.0;
  double standoff = 0.0;
  Point2 origin;
  for (int attempt = 0; attempt < 32; ++attempt) {
    heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    standoff = rng.uniform(opt.standoff_min, opt.standoff_max);
    origin = target - standoff * unit(heading);
    if (origin.x >= g.min.x && origin.x <= g.max.x && origin.y >= g.min.y && origin.y <= g.max.y) {
      break;
    }
  }
  const Point2 axis = unit(heading);
  double theta = rng.uniform(noise.theta_min, noise.theta_max);
  // The shower widens the spread until the whole object is covered.
  double reach = 0.0;
  for (Point2 q : cover) {
    const Point2 d = q - origin;
    const double off = std::atan2(std::abs(cross(axis, d)), dot(axis, d));
    theta = std::max(theta, 2.0 * off + 0.1);
    reach = std::max(reach, norm(d));
  }
  theta = std::min(theta, std::numbers::pi);
  const double range = std::max(sector_range_for_centroid(standoff, theta), reach + 0.25);

  const Point2 noisy_origin{rng.normal(origin.x, noise.position_sigma),
                            rng.normal(origin.y, noise.position_sigma)};
  const double noisy_heading = rng.normal(heading, noise.direction_sigma);
  return DeicticAction(noisy_origin, unit(noisy_heading), theta, range);
}

double sector_range_for_centroid(double distance, double apex_angle) {
  const double half = 0.5 * apex_angle;
  return distance * 3.0 * half / (2.0 * std::sin(half));
}

std::vector<DyadRecord> synth_dyads(std::uint64_t seed, int per_condition,
                                    const GestureNoise& noise, const SynthOptions& options) {
  if (per_condition < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one record per condition");
  }
  std::vector<DyadRecord> records;
  records.reserve(4 * static_cast<std::size_t>(per_condition));
  for (std::size_t ci = 0; ci < kAllConditions.size(); ++ci) {
    const Condition condition = kAllConditions[ci];
    for (int i = 0; i < per_condition; ++i) {
      Rng rng(derive_seed(seed, ci * 1'000'003ULL + static_cast<std::uint64_t>(i)));
      DyadRecord rec;
      rec.condition = condition;
      const int pieces = rng.uniform_int(options.min_pieces, options.max_pieces);
      rec.scene = generate_scene(rng.next(), pieces, {options.grid});

      std::vector<Point2> goal_piece_centers;
      if (is_known_goal(condition)) {
        const PartLabel& part = rec.scene.labels[rng.index(rec.scene.labels.size())];
        rec.goal = Goal::object_level(part);
        for (int id : part.piece_ids) {
          goal_piece_centers.push_back(mask_centroid(piece_silhouette(rec.scene, id)));
        }
      } else {
        rec.goal = Goal::pixel_level(blob_goal(rec.scene, rng, options));
      }
      const int count = is_multi_gesture(condition)
                            ? rng.uniform_int(options.min_gestures_mg, options.max_gestures_mg)
                            : 1;
      rec.gestures = synth_gestures(rec.scene, goal_mask(rec.scene, rec.goal), goal_piece_centers,
                                    count, rng, noise, options);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "incomplete beta needs positive shape parameters");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult t_test(std::span<const double> a, std::span<const double> b, bool welch) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "t-test needs at least two values per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a, ma);
  const double vb = sample_variance(b, mb);

  TTestResult r;
  double se2 = 0.0;
  if (welch) {
    se2 = va / na + vb / nb;
    const double num = se2 * se2;
    const double den = (va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0);
    r.df = den > 0.0 ? num / den : na + nb - 2.0;
  } else {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  }
  if (se2 == 0.0) {
    if (ma == mb) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.p = std::clamp(regularized_incomplete_beta(0.5 * r.df, 0.5, r.df / (r.df + r.t * r.t)), 0.0,
                   1.0);
  return r;
}

const ConditionStats* EvalReport::find(Condition c) const {
  for (const ConditionStats& s : conditions) {
    if (s.condition == c) return &s;
  }
  return nullptr;
}

RecordScore score_record(const DyadRecord& record, const KnownObjects& known,
                         const PredictConfig& cfg) {
  const ForegroundMap goal = goal_mask(record.scene, record.goal);
  RecordScore score;
  ForegroundMap prediction(record.scene.grid);
  try {
    prediction = predict_foreground(record.scene, record.gestures, known, cfg).foreground;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyRegion && e.code() != ErrorCode::kNoCandidates) throw;
    score.abstained = true;
  }
  const auto [g, p] = align(goal, prediction);
  score.nmse = nmse(g, p);
  return score;
}

std::vector<RecordScore> score_records(std::span<const DyadRecord> records,
                                       const KnownObjects& known, const EvalOptions& options) {
  std::vector<RecordScore> scores(records.size());
  PredictConfig cfg = options.predict;
  cfg.jobs = 1;
  detail::parallel_for(records.size(), options.jobs,
                       [&](std::size_t i) { scores[i] = score_record(records[i], known, cfg); });
  return scores;
}

EvalReport summarize(std::span<const DyadRecord> records, std::span<const RecordScore> scores,
                     bool welch) {
  if (records.size() != scores.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one score per record is required");
  }
  EvalReport report;
  report.welch = welch;
  std::array<std::vector<double>, 4> samples;
  std::array<std::size_t, 4> abstentions{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto c = static_cast<std::size_t>(records[i].condition);
    samples[c].push_back(scores[i].nmse);
    abstentions[c] += scores[i].abstained;
  }
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < 4; ++c) {
    if (samples[c].empty()) continue;
    present.push_back(c);
    const double m = mean_of(samples[c]);
    report.conditions.push_back({kAllConditions[c], samples[c].size(), m,
                                 std::sqrt(sample_variance(samples[c], m)), abstentions[c]});
  }
  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = i + 1; j < present.size(); ++j) {
      const auto& a = samples[present[i]];
      const auto& b = samples[present[j]];
      if (a.size() < 2 || b.size() < 2) continue;
      report.pairwise.push_back({std::string(kConditionNames[present[i]]),
                                 std::string(kConditionNames[present[j]]), t_test(a, b, welch)});
    }
  }
  std::vector<double> known_goal(samples[0]);
  known_goal.insert(known_goal.end(), samples[1].begin(), samples[1].end());
  std::vector<double> unknown_goal(samples[2]);
  unknown_goal.insert(unknown_goal.end(), samples[3].begin(), samples[3].end());
  if (known_goal.size() >= 2 && unknown_goal.size() >= 2) {
    report.known_vs_unknown = PairwiseTest{"KG", "UG", t_test(known_goal, unknown_goal, welch)};
  }
  return report;
}

EvalReport evaluate(std::span<const DyadRecord> records, const KnownObjects& known,
                    const EvalOptions& options) {
  const std::vector<RecordScore> scores = score_records(records, known, options);
  return summarize(records, scores, options.welch);
}

std::vector<Exemplar> dataset_exemplars(std::span<const DyadRecord> records) {
  std::vector<Exemplar> out;
  for (const DyadRecord& r : records) {
    auto ex = scene_exemplars(r.scene);
    out.insert(out.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
  }
  return out;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return dump_json(report_to_json(report)) + "\n";

  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "condition,n,mean_nmse,std_nmse,abstentions\n";
    for (const ConditionStats& s : report.conditions) {
      out << condition_name(s.condition) << ',' << s.n << ',' << format_fixed(s.mean, 9) << ','
          << format_fixed(s.stddev, 9) << ',' << s.abstentions << '\n';
    }
    out << "\na,b,t,df,p\n";
    for (const PairwiseTest& t : report.pairwise) {
      out << t.a << ',' << t.b << ',' << format_fixed(t.result.t, 6) << ','
          << format_fixed(t.result.df, 3) << ',' << format_fixed(t.result.p, 9) << '\n';
    }
    if (report.known_vs_unknown) {
      const PairwiseTest& t = *report.known_vs_unknown;
      out << t.a << ',' << t.b << ',' << format_fixed(t.result.t, 6) << ','
          << format_fixed(t.result.df, 3) << ',' << format_fixed(t.result.p, 9) << '\n';
    }
    return out.str();
  }

  // Upper-triangle significance table with the error column on the right.
  constexpr std::size_t kCol = 14;
  std::vector<std::string> names;
  for (const ConditionStats& s : report.conditions) {
    names.emplace_back(condition_name(s.condition));
  }
  auto lookup = [&](const std::string& a, const std::string& b) -> const PairwiseTest* {
    for (const PairwiseTest& t : report.pairwise) {
      if (t.a == a && t.b == b) return &t;
    }
    return nullptr;
  };
  out << (report.welch ? "Welch" : "Student") << " t-test p-values; mean NMSE per condition\n";
  out << pad("", kCol);
  for (std::size_t j = 1; j < names.size(); ++j) out << pad(names[j], kCol);
  out << "NMSE\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << pad(names[i], kCol);
    for (std::size_t j = 1; j < names.size(); ++j) {
      const PairwiseTest* t = j > i ? lookup(names[i], names[j]) : nullptr;
      out << pad(t ? format_p(t->result.p) : "", kCol);
    }
    out << format_fixed(report.conditions[i].mean, 6) << '\n';
  }
  out << '\n';
  for (const ConditionStats& s : report.conditions) {
    out << condition_name(s.condition) << ": n=" << s.n << " mean=" << format_fixed(s.mean, 6)
        << " std=" << format_fixed(s.stddev, 6) << " abstentions=" << s.abstentions << '\n';
  }
  for (const PairwiseTest& t : report.pairwise) {
    out << t.a << " vs " << t.b << ": t=" << format_fixed(t.result.t, 4)
        << " df=" << format_fixed(t.result.df, 2) << ' ' << format_p(t.result.p) << '\n';
  }
  if (report.known_vs_unknown) {
    const PairwiseTest& t = *report.known_vs_unknown;
    out << "KG vs UG: t=" << format_fixed(t.result.t, 4) << " df=" << format_fixed(t.result.df, 2)
        << ' ' << format_p(t.result.p) << '\n';
  }
  return out.str();
}

}  // namespace jgs
