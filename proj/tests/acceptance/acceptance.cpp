// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "jgs/error.hpp"
#include "jgs/evaluation.hpp"
#include "jgs/features.hpp"
#include "jgs/foreground.hpp"
#include "jgs/json.hpp"
#include "jgs/oracle.hpp"

using namespace jgs;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

class Suite {
 public:
  void run(const std::string& name, const std::function<Outcome()>& body,
           double time_limit_s = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0.0 && s >= time_limit_s) {
      o.passed = false;
      o.detail += " [over time limit]";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, " (%.2fs", s);
    std::string t = timing;
    if (time_limit_s > 0.0) {
      std::snprintf(timing, sizeof timing, ", limit %.0fs", time_limit_s);
      t += timing;
    }
    t += ")";
    std::printf("%s %s: %s%s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                t.c_str());
    std::fflush(stdout);
    failed_ += !o.passed;
  }
  int failed() const { return failed_; }

 private:
  int failed_ = 0;
};

// Accumulates named checks into one outcome.
struct Checks {
  Outcome out;
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  Outcome finish(const std::string& summary) {
    out.passed = failures.empty();
    out.detail = summary;
    for (const std::string& f : failures) out.detail += "; failed: " + f;
    return out;
  }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

struct Command {
  int exit_code = -1;
  std::string out;
};

Command run(const std::string& cmd) {
  Command r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ForegroundMap filled(const GridSpec& g, bool v) {
  ForegroundMap m(g);
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) m.set(c, r, v);
  return m;
}

Outcome nmse_exactness() {
  Checks c;
  const GridSpec ten{10, 10, {0, 0}, {10, 10}};
  const ForegroundMap ones = filled(ten, true), zeros = filled(ten, false);
  c.expect(nmse(ones, ones) == 0.0, "identity");
  c.expect(std::abs(nmse(ones, zeros) - 0.1) <= 1e-15, "ones vs zeros = 0.1");
  ForegroundMap one = zeros;
  one.set(4, 4, true);
  c.expect(std::abs(nmse(one, zeros) - 0.01) <= 1e-15, "single pixel = 0.01");

  Rng rng(1000);
  const GridSpec g{32, 32, {0, 0}, {32, 32}};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ForegroundMap a(g), b(g);
    const double p = rng.uniform();
    for (int r = 0; r < 32; ++r)
      for (int col = 0; col < 32; ++col) a.set(col, r, rng.uniform() < p), b.set(col, r, rng.uniform() < p);
    worst = std::max(worst, std::abs(nmse(a, b) - oracle::oracle_nmse(a, b)));
  }
  c.expect(worst <= 1e-12, "fast vs oracle");
  return c.finish("examples exact; max |fast - oracle| = " + fmt(worst) + " over 1000 pairs");
}

Outcome oracle_equivalence() {
  std::size_t compared = 0, agree = 0, abstained = 0, screened = 0, max_candidates = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const oracle::EquivalenceCase c = oracle::equivalence_case(derive_seed(2024, s));
    screened += c.screened;
    max_candidates = std::max(max_candidates, fuse_gestures(c.scene, c.gestures).piece_ids.size());
    std::vector<ForegroundMap> masks;
    for (const Exemplar& e : c.exemplars) masks.push_back(e.mask);
    const KnownObjects known = train(c.exemplars);
    std::vector<int> fast;
    try {
      fast = predict_foreground(c.scene, c.gestures, known).piece_ids;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyRegion && e.code() != ErrorCode::kNoCandidates) throw;
      ++abstained;
      continue;
    }
    ++compared;
    try {
      agree += oracle::oracle_predict(c.scene, c.gestures, masks).piece_ids == fast;
    } catch (const Error&) {
    }
  }
  Outcome o;
  o.passed = compared > 0 && agree == compared && max_candidates <= 6;
  o.detail = std::to_string(agree) + "/" + std::to_string(compared) + " subsets agree over 200 scenes (" +
             std::to_string(abstained) + " abstained, max " + std::to_string(max_candidates) +
             " candidates, " + std::to_string(screened) + " non-exemplar-exact draws skipped)";
  return o;
}

Outcome classifier_self_consistency() {
  Rng rng(5150);
  std::vector<Exemplar> all;
  for (int i = 0; i < 20; ++i) {
    for (auto& e : scene_exemplars(generate_scene(rng.next(), 7))) all.push_back(std::move(e));
  }
  const KnownObjects k = train(all);
  std::map<std::pair<std::string, std::string>, std::size_t> entry_of;
  for (const Exemplar& e : all) entry_of.try_emplace({e.label, e.group}, entry_of.size());
  std::size_t own = 0;
  for (const Exemplar& e : all) own += classify(e.mask, k)[entry_of.at({e.label, e.group})].accepted;

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
  Outcome o;
  o.passed = own == all.size() && rejected >= 95;
  o.detail = std::to_string(own) + "/" + std::to_string(all.size()) +
             " exemplars accepted by their own entry (" + std::to_string(k.size()) + " entries); " +
             std::to_string(rejected) + "/100 noise masks rejected";
  return o;
}

Outcome ranking_invariance() {
  // Single-gesture instances: one centroid per hypothesis distance.
  std::size_t instances = 0, same = 0, attempts = 0;
  for (std::uint64_t s = 0; instances < 100 && attempts < 1000; ++s, ++attempts) {
    const auto recs = synth_dyads(derive_seed(31337, s), 1);
    const DyadRecord& rec = recs[s % 2 == 0 ? 0 : 2];  // SGKG or SGUG
    const KnownObjects known = train(scene_exemplars(rec.scene));
    std::vector<std::vector<int>> picks;
    try {
      for (double c : {0.1, 1.0, 10.0}) {
        PredictConfig cfg;
        cfg.ranker.softening = c;
        picks.push_back(predict_foreground(rec.scene, rec.gestures, known, cfg).piece_ids);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyRegion && e.code() != ErrorCode::kNoCandidates) throw;
      continue;
    }
    ++instances;
    same += picks[0] == picks[1] && picks[1] == picks[2];
  }
  Outcome o;
  o.passed = instances == 100 && same == instances;
  o.detail = std::to_string(same) + "/" + std::to_string(instances) +
             " single-gesture instances pick the same subset for c in {0.1, 1, 10}";
  return o;
}

Outcome directional_condition_ordering() {
  const std::vector<DyadRecord> records = synth_dyads(7, 30);
  EvalOptions opt;
  opt.jobs = 1;
  const EvalReport r = evaluate(records, train(dataset_exemplars(records)), opt);
  const double sgkg = r.find(Condition::kSGKG)->mean, mgkg = r.find(Condition::kMGKG)->mean;
  const double sgug = r.find(Condition::kSGUG)->mean, mgug = r.find(Condition::kMGUG)->mean;
  const double p = r.known_vs_unknown->result.p;
  Checks c;
  c.expect(mgkg <= sgkg, "MGKG <= SGKG");
  c.expect(sgkg < sgug && sgkg < mgug, "SGKG < SGUG, MGUG");
  c.expect(sgkg < 0.01 && mgkg < 0.01, "KG means < 0.01");
  const double ratio = std::min(sgug, mgug) / std::max(sgkg, mgkg);
  c.expect(ratio >= 3.0, "UG >= 3x KG");
  c.expect(p < 0.01, "KG vs UG p < 0.01");
  return c.finish("SGKG " + fmt(sgkg, 4) + ", MGKG " + fmt(mgkg, 4) + ", SGUG " + fmt(sgug, 4) +
                  ", MGUG " + fmt(mgug, 4) + "; min UG / max KG = " + fmt(ratio, 3) +
                  "; KG vs UG t = " + fmt(r.known_vs_unknown->result.t, 4) + ", p = " + fmt(p, 3));
}

Outcome t_test_correctness() {
  Checks c;
  const std::vector<double> a = {1, 2, 3}, b = {2, 3, 4};
  const TTestResult r = t_test(a, b);
  const double p_oracle = 2.0 * (1.0 - oracle::oracle_t_cdf(std::abs(r.t), r.df));
  c.expect(std::abs(r.t + 1.2247) <= 1e-4, "t = -1.2247");
  c.expect(r.df == 4.0, "df = 4");
  c.expect(std::abs(r.p - 0.2879) <= 1e-3, "p = 0.2879");
  c.expect(std::abs(r.p - p_oracle) <= 1e-8, "p matches integration oracle");

  Rng rng(77);
  std::size_t anti = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(rng.uniform_int(2, 30)), y(rng.uniform_int(2, 30));
    for (double& v : x) v = rng.normal(0, 1);
    for (double& v : y) v = rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2));
    const TTestResult xy = t_test(x, y), yx = t_test(y, x);
    anti += xy.t == -yx.t && xy.p == yx.p;
  }
  c.expect(anti == 100, "antisymmetry");
  return c.finish("t = " + fmt(r.t, 6) + ", df = " + fmt(r.df) + ", p = " + fmt(r.p, 6) +
                  " (oracle " + fmt(p_oracle, 6) + "); antisymmetric on " + std::to_string(anti) +
                  "/100 pairs");
}

Outcome hog_properties() {
  Checks c;
  const HogConfig cfg;
  c.expect(cfg.descriptor_length() == 1764, "length 1764");
  for (double v : {0.0, 1.0}) {
    const HogDescriptor d = hog({64, std::vector<double>(64 * 64, v)}, cfg);
    bool zero = d.values.size() == 1764;
    for (double x : d.values) zero = zero && x == 0.0;
    c.expect(zero, "uniform window " + fmt(v) + " gives zero descriptor");
  }
  double worst = 1.0;
  for (int edge : {8, 21, 32, 50}) {
    PixelWindow w{64, std::vector<double>(64 * 64, 0.0)};
    for (int y = 0; y < 64; ++y)
      for (int x = edge; x < 64; ++x) w.pixels[y * 64 + x] = 1.0;
    const HogDescriptor d = hog(w, cfg);
    double total = 0, bin0 = 0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      total += d.values[i] * d.values[i];
      if (i % cfg.bins == 0) bin0 += d.values[i] * d.values[i];
    }
    worst = std::min(worst, total > 0 ? bin0 / total : 0.0);
  }
  c.expect(worst >= 0.9, "vertical edge concentration >= 0.9");
  return c.finish("uniform windows give zero; length " + std::to_string(cfg.descriptor_length()) +
                  "; vertical-edge energy in the horizontal-gradient bin >= " + fmt(worst, 4));
}

Outcome determinism(const std::string& cli) {
  Checks c;
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "jgs_acceptance";
  std::filesystem::create_directories(dir);
  const std::string ds = (dir / "seed7.json").string();
  c.expect(run(cli + " synth --seed 7 --n 30 --out " + ds).exit_code == 0, "synth");

  std::vector<std::string> evals;
  for (const char* jobs : {"1", "1", "4"}) {
    const Command r = run(cli + " eval --format json --jobs " + jobs + " --dataset " + ds);
    c.expect(r.exit_code == 0, std::string("eval --jobs ") + jobs);
    evals.push_back(r.out);
  }
  c.expect(evals[0] == evals[1] && evals[1] == evals[2] && !evals[0].empty(), "eval byte-identical");

  const std::vector<DyadRecord> records = synth_dyads(7, 30);
  std::size_t predicts = 0, identical = 0;
  for (std::size_t i = 0; i < records.size(); i += 12) {
    const std::string scene = (dir / ("scene" + std::to_string(i) + ".json")).string();
    const std::string gestures = (dir / ("gestures" + std::to_string(i) + ".json")).string();
    save_scene(records[i].scene, scene);
    write_text_file(gestures, dump_json(gestures_to_json(records[i].gestures)));
    const std::string base = cli + " predict --scene " + scene + " --gestures " + gestures + " 2>/dev/null";
    const Command a = run(base), b = run(base), j = run(base + " --jobs 4");
    ++predicts;
    identical += a.out == b.out && a.out == j.out && a.exit_code == b.exit_code &&
                 a.exit_code == j.exit_code && !a.out.empty();
  }
  c.expect(identical == predicts, "predict byte-identical");
  return c.finish("eval identical across 2 runs and --jobs 1/4; predict identical on " +
                  std::to_string(identical) + "/" + std::to_string(predicts) + " records (runs and --jobs 1/4)");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : JGS_CLI_PATH;
  Suite suite;
  suite.run("nmse-exactness", nmse_exactness, 1.0);
  suite.run("oracle-pipeline-equivalence", oracle_equivalence, 60.0);
  suite.run("classifier-self-consistency", classifier_self_consistency);
  suite.run("ranking-invariance", ranking_invariance);
  suite.run("directional-condition-ordering", directional_condition_ordering, 120.0);
  suite.run("t-test-correctness", t_test_correctness);
  suite.run("hog-properties", hog_properties);
  suite.run("determinism", [&] { return determinism(cli); });
  std::printf("%s: %d criteria failed\n", suite.failed() ? "FAIL" : "PASS", suite.failed());
  return suite.failed() ? 1 : 0;
}
