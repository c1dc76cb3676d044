// jgs: batch entry points for scene generation, training, prediction,
// synthetic evaluation, oracle checks and the session server.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "jgs/error.hpp"
#include "jgs/evaluation.hpp"
#include "jgs/foreground.hpp"
#include "jgs/json.hpp"
#include "jgs/oracle.hpp"
#include "jgs/recognition.hpp"
#include "jgs/rng.hpp"
#include "jgs/scene.hpp"
#include "jgs/server.hpp"

namespace fs = std::filesystem;
using namespace jgs;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIoError = 3,
  kInputError = 4,
  kCapExceeded = 5,
  kEmptyRegionExit = 6,
  kNoCandidatesExit = 7,
  kCheckFailed = 8,
};

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (bad flags)\n"
    "  3  I/O error (missing or unwritable file)\n"
    "  4  invalid input (malformed JSON, schema violation, bad geometry)\n"
    "  5  enumeration cap exceeded (predict --no-cap-fallback)\n"
    "  6  empty gesture region (no piece inside any cone)\n"
    "  7  no candidates (no hypothesis recognized as a known object)\n"
    "  8  oracle-check found a disagreement\n"
    "Errors are written to stderr as {\"error\":{\"code\",\"message\"},\"exit\"}.\n";

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kNotFound:
      return kIoError;
    case ErrorCode::kEnumerationCap:
      return kCapExceeded;
    case ErrorCode::kEmptyRegion:
      return kEmptyRegionExit;
    case ErrorCode::kNoCandidates:
      return kNoCandidatesExit;
    default:
      return kInputError;
  }
}

int report_error(std::string_view code, const std::string& message, int exit_code) {
  Json j = {{"error", {{"code", std::string(code)}, {"message", message}}}, {"exit", exit_code}};
  std::cerr << j.dump() << "\n";
  return exit_code;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(out, text);
  }
}

// '*' and '?' wildcards in the file-name component only.
bool wildcard_match(std::string_view pattern, std::string_view name) {
  std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path path(pattern);
  const std::string leaf = path.filename().string();
  if (leaf.find_first_of("*?") == std::string::npos) return {pattern};
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "no such directory: " + dir.string());
  }
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && wildcard_match(leaf, entry.path().filename().string())) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KnownObjects load_or_train(const std::string& model_path, std::span<const Exemplar> fallback) {
  if (!model_path.empty()) return model_from_json(read_json_file(model_path));
  return train(fallback);
}

std::string base_dir_of(const std::string& path) {
  const fs::path p(path);
  return p.has_parent_path() ? p.parent_path().string() : ".";
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint guided search: deictic gestures to predicted foregrounds"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  // gen-scenes
  auto* gen = app.add_subcommand("gen-scenes", "Generate seeded tangram scenes");
  std::uint64_t gen_seed = 1;
  int gen_count = 1;
  int gen_pieces = 7;
  std::string gen_out = ".";
  gen->add_option("--seed", gen_seed, "Base seed")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of scenes")->capture_default_str()->check(
      CLI::PositiveNumber);
  gen->add_option("--pieces", gen_pieces, "Pieces per scene (1-7)")->capture_default_str()->check(
      CLI::Range(1, 7));
  gen->add_option("--out-dir", gen_out, "Output directory")->capture_default_str();

  // train
  auto* tr = app.add_subcommand("train", "Train known objects from labeled scenes");
  std::vector<std::string> tr_scenes;
  std::string tr_dataset;
  std::string tr_labels;
  std::string tr_out;
  tr->add_option("--scenes", tr_scenes, "Scene files or file-name globs (e.g. dir/*.json)");
  tr->add_option("--dataset", tr_dataset, "Dyad dataset whose scene labels are used");
  tr->add_option("--labels", tr_labels, "Comma-separated labels to keep (default: all)");
  tr->add_option("--out", tr_out, "Model output path (default: stdout)");

  // predict
  auto* pr = app.add_subcommand("predict", "Predict the referenced foreground");
  std::string pr_scene, pr_gestures, pr_model, pr_pgm, pr_out;
  bool pr_no_fallback = false;
  std::size_t pr_cap = 10;
  double pr_softening = 1.0;
  int pr_jobs = 1;
  pr->add_option("--scene", pr_scene, "Scene JSON")->required();
  pr->add_option("--gestures", pr_gestures, "Gesture sequence JSON")->required();
  pr->add_option("--model", pr_model, "Model JSON (default: train on the scene's labels)");
  pr->add_option("--pgm", pr_pgm, "Also write the predicted mask as an ASCII PGM");
  pr->add_option("--out", pr_out, "Prediction output path (default: stdout)");
  pr->add_option("--cap", pr_cap, "Enumeration cap")->capture_default_str();
  pr->add_flag("--no-cap-fallback", pr_no_fallback,
               "Fail with exit 5 instead of falling back when the cap is exceeded");
  pr->add_option("--softening", pr_softening, "Ranking softening constant")->capture_default_str();
  pr->add_option("--jobs", pr_jobs, "Worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);

  // synth
  auto* sy = app.add_subcommand("synth", "Synthesize a seeded dyad dataset");
  std::uint64_t sy_seed = 7;
  int sy_n = 30;
  GestureNoise sy_noise;
  std::string sy_out;
  sy->add_option("--seed", sy_seed, "Seed")->capture_default_str();
  sy->add_option("--n", sy_n, "Records per condition")->capture_default_str()->check(
      CLI::PositiveNumber);
  sy->add_option("--position-sigma", sy_noise.position_sigma, "Hand position noise (units)")
      ->capture_default_str();
  sy->add_option("--direction-sigma", sy_noise.direction_sigma, "Direction noise (radians)")
      ->capture_default_str();
  sy->add_option("--theta-min", sy_noise.theta_min, "Minimum apex angle (radians)")
      ->capture_default_str();
  sy->add_option("--theta-max", sy_noise.theta_max, "Maximum apex angle (radians)")
      ->capture_default_str();
  sy->add_option("--out", sy_out, "Dataset output path (default: stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Score a dataset per condition with t-tests");
  std::string ev_dataset, ev_model, ev_format = "text", ev_out;
  int ev_jobs = 1;
  bool ev_welch = false;
  ev->add_option("--dataset", ev_dataset, "Dyad dataset JSON")->required();
  ev->add_option("--model", ev_model, "Model JSON (default: train on the dataset's labels)");
  ev->add_option("--format", ev_format, "text | json | csv")->capture_default_str()->check(
      CLI::IsMember({"text", "json", "csv"}));
  ev->add_option("--jobs", ev_jobs, "Worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);
  ev->add_flag("--welch", ev_welch, "Use Welch's unequal-variance test");
  ev->add_option("--out", ev_out, "Report output path (default: stdout)");

  // oracle-check
  auto* oc = app.add_subcommand("oracle-check", "Cross-check fast paths against brute force");
  std::string oc_suite = "all";
  oc->add_option("suite", oc_suite, "nmse | pipeline | tcdf | all")->capture_default_str()->check(
      CLI::IsMember({"nmse", "pipeline", "tcdf", "all"}));

  // serve
  auto* sv = app.add_subcommand("serve", "Run the session HTTP server");
  std::string sv_addr, sv_static, sv_model, sv_snapshot;
  int sv_port = -1;
  sv->add_option("--addr", sv_addr, "Listen host or host:port (env JGS_ADDR; default 127.0.0.1)");
  sv->add_option("--port", sv_port, "Listen port, 0 for any (env JGS_PORT; default 8080)");
  sv->add_option("--static-dir", sv_static, "Directory served at /");
  sv->add_option("--model", sv_model, "Shared model (default: each session trains on its scene)");
  sv->add_option("--snapshot", sv_snapshot, "Write all sessions here on shutdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kUsage);
  }

  try {
    if (*gen) {
      fs::create_directories(gen_out);
      Json index = Json::array();
      for (int i = 0; i < gen_count; ++i) {
        const Scene scene = generate_scene(derive_seed(gen_seed, static_cast<std::uint64_t>(i)),
                                           gen_pieces);
        char name[32];
        std::snprintf(name, sizeof name, "scene_%04d.json", i);
        save_scene(scene, (fs::path(gen_out) / name).string());
        index.push_back(name);
      }
      std::cout << dump_json(index) << "\n";
      return kOk;
    }

    if (*tr) {
      if (tr_scenes.empty() == tr_dataset.empty()) {
        return report_error("usage", "give exactly one of --scenes or --dataset", kUsage);
      }
      std::vector<Exemplar> exemplars;
      if (!tr_dataset.empty()) {
        const auto records = dataset_from_json(read_json_file(tr_dataset), base_dir_of(tr_dataset));
        exemplars = dataset_exemplars(records);
      } else {
        std::vector<std::string> files;
        for (const auto& pattern : tr_scenes) {
          for (auto& f : expand_glob(pattern)) files.push_back(std::move(f));
        }
        if (files.empty()) throw Error(ErrorCode::kIo, "no scene files matched");
        for (const auto& f : files) {
          std::vector<std::string> warnings;
          const Scene scene = load_scene(f, &warnings);
          for (const auto& w : warnings) std::cerr << f << ": warning: " << w << "\n";
          for (auto& e : scene_exemplars(scene)) exemplars.push_back(std::move(e));
        }
      }
      if (!tr_labels.empty()) {
        const auto keep = split_csv(tr_labels);
        const std::set<std::string> wanted(keep.begin(), keep.end());
        std::erase_if(exemplars, [&](const Exemplar& e) { return !wanted.count(e.label); });
      }
      emit(dump_json(model_to_json(train(exemplars))) + "\n", tr_out);
      return kOk;
    }

    if (*pr) {
      std::vector<std::string> warnings;
      const Scene scene = load_scene(pr_scene, &warnings);
      for (const auto& w : warnings) std::cerr << pr_scene << ": warning: " << w << "\n";
      const GestureSequence gestures = gestures_from_json(read_json_file(pr_gestures));
      const KnownObjects known = load_or_train(pr_model, scene_exemplars(scene));
      PredictConfig cfg;
      cfg.enumeration_cap = pr_cap;
      cfg.cap_fallback = !pr_no_fallback;
      cfg.ranker.softening = pr_softening;
      cfg.jobs = pr_jobs;
      try {
        const RankedPrediction p = predict_foreground(scene, gestures, known, cfg);
        Json j = prediction_to_json(p);
        j["abstained"] = false;
        emit(dump_json(j) + "\n", pr_out);
        if (!pr_pgm.empty()) write_text_file(pr_pgm, to_pgm(p.foreground));
        return kOk;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyRegion && e.code() != ErrorCode::kNoCandidates) throw;
        const Json j = {{"abstained", true},
                        {"reason", std::string(error_code_name(e.code()))},
                        {"message", e.what()}};
        emit(dump_json(j) + "\n", pr_out);
        if (!pr_pgm.empty()) write_text_file(pr_pgm, to_pgm(ForegroundMap(scene.grid)));
        return report_error(error_code_name(e.code()), e.what(), exit_for(e.code()));
      }
    }

    if (*sy) {
      const auto records = synth_dyads(sy_seed, sy_n, sy_noise);
      emit(dump_json(dataset_to_json(records)) + "\n", sy_out);
      return kOk;
    }

    if (*ev) {
      const auto records = dataset_from_json(read_json_file(ev_dataset), base_dir_of(ev_dataset));
      const KnownObjects known = load_or_train(ev_model, dataset_exemplars(records));
      EvalOptions opt;
      opt.jobs = ev_jobs;
      opt.welch = ev_welch;
      const EvalReport report = evaluate(records, known, opt);
      emit(emit_report(report, *parse_report_format(ev_format)), ev_out);
      return kOk;
    }

    if (*oc) {
      bool ok = true;
      for (const auto& r : oracle::run_checks(oc_suite)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        ok = ok && r.passed;
      }
      return ok ? kOk : kCheckFailed;
    }

    if (*sv) {
      server::HttpOptions http;
      if (sv_addr.empty()) {
        if (const char* env = std::getenv("JGS_ADDR")) sv_addr = env;
      }
      if (!sv_addr.empty()) {
        const auto colon = sv_addr.rfind(':');
        if (colon != std::string::npos && sv_addr.find(']') == std::string::npos) {
          http.host = sv_addr.substr(0, colon);
          http.port = std::stoi(sv_addr.substr(colon + 1));
        } else {
          http.host = sv_addr;
        }
      }
      if (sv_port < 0) {
        if (const char* env = std::getenv("JGS_PORT")) sv_port = std::stoi(env);
      }
      if (sv_port >= 0) http.port = sv_port;
      http.static_dir = sv_static;

      server::ServiceOptions opts;
      if (!sv_model.empty()) {
        opts.model = std::make_shared<const KnownObjects>(model_from_json(read_json_file(sv_model)));
      }
      server::SessionService service(opts);
      server::HttpServer srv(service, http);
      const int port = srv.bind();
      std::cerr << dump_json({{"listening", {{"host", http.host}, {"port", port}}}}, -1) << "\n";

      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread watcher([&] {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        srv.stop();
      });
      srv.serve();
      g_stop = true;
      watcher.join();
      if (!sv_snapshot.empty()) write_text_file(sv_snapshot, dump_json(service.snapshot()) + "\n");
      return kOk;
    }
  } catch (const Error& e) {
    return report_error(error_code_name(e.code()), e.what(), exit_for(e.code()));
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kInternal);
  }
  return kUsage;
}
