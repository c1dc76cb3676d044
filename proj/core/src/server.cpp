#include "jgs/server.hpp"

#include <mutex>
#include <random>
#include <vector>

#include <httplib.h>

#include "jgs/error.hpp"
#include "jgs/foreground.hpp"
#include "jgs/rng.hpp"

namespace jgs::server {
namespace {

Response error_response(int status, std::string_view code, const std::string& message) {
  return {status, dump_json({{"code", std::string(code)}, {"message", message}})};
}

Response from_error(const Error& e) {
  const int status = e.code() == ErrorCode::kNotFound ? 404 : 400;
  return error_response(status, error_code_name(e.code()), e.what());
}

template <typename Fn>
Response guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  std::lock_guard lock(mutex);
  static const char* hex = "0123456789abcdef";
  std::string id;
  std::uint64_t v = engine();
  for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(hex[v & 0xF]);
  return id;
}

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0 || v > INT32_MAX) throw std::invalid_argument(what);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad ") + what + " '" + text + "'");
  }
}

}  // namespace

struct SessionService::Session {
  std::string id;
  Scene scene;
  Goal goal = Goal::pixel_level(ForegroundMap(GridSpec{}));
  ForegroundMap goal_mask;
  bool reveal_goal = false;
  std::shared_ptr<const KnownObjects> model;

  mutable std::shared_mutex mutex;
  GestureSequence gestures;
  std::optional<RankedPrediction> latest;
  std::string abstain_reason;
  std::vector<double> trace;
  std::vector<double> reported;

  ForegroundMap current_prediction() const {
    return latest ? latest->foreground : ForegroundMap(scene.grid);
  }

  Json prediction_json() const {
    Json j;
    if (latest) {
      j = prediction_to_json(*latest);
      j["abstained"] = false;
    } else {
      j = {{"foreground", mask_to_json(ForegroundMap(scene.grid))},
           {"label", nullptr},
           {"score", nullptr},
           {"piece_ids", Json::array()},
           {"abstained", true},
           {"reason", abstain_reason}};
    }
    if (reveal_goal && !trace.empty()) j["nmse"] = trace.back();
    return j;
  }

  Json to_json() const {
    Json j = {{"id", id},
              {"scene", scene_to_json(scene)},
              {"reveal_goal", reveal_goal},
              {"gestures", gestures.empty() ? Json::array() : gestures_to_json(gestures)},
              {"gesture_count", gestures.size()},
              {"latest", gestures.empty() ? Json(nullptr) : prediction_json()},
              {"reported_nmse", reported}};
    if (reveal_goal) {
      j["goal"] = goal_to_json(goal);
      j["trace"] = trace;
    }
    return j;
  }
};

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}
SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no session '" + id + "'");
  return it->second;
}

Response SessionService::create_session(const std::string& body) {
  return guarded([&] {
    const Json req = body.empty() ? Json::object() : parse_json(body);
    if (!req.is_object()) throw Error(ErrorCode::kSchemaViolation, "request must be an object");

    Scene scene;
    std::uint64_t goal_seed = 0;
    const Json scene_req = req.value("scene", Json{{"generate", Json::object()}});
    if (scene_req.is_object() && scene_req.contains("generate")) {
      const Json& g = scene_req.at("generate");
      int seed = 0, n = 5;
      try {
        seed = g.value("seed", 0);
        n = g.value("n", 5);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kSchemaViolation, e.what());
      }
      scene = jgs::generate_scene(static_cast<std::uint64_t>(seed), n);
      goal_seed = static_cast<std::uint64_t>(seed);
    } else {
      scene = scene_from_json(scene_req);
    }

    const Json goal_req = req.value("goal", Json("sampled"));
    std::optional<Goal> goal;
    if (goal_req.is_string() || (goal_req.is_object() && goal_req.contains("sampled"))) {
      if (goal_req.is_string() && goal_req.get<std::string>() != "sampled") {
        throw Error(ErrorCode::kSchemaViolation, "goal must be \"sampled\" or a goal object");
      }
      if (goal_req.is_object()) {
        try {
          goal_seed = goal_req.at("sampled").value("seed", goal_seed);
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::kSchemaViolation, e.what());
        }
      }
      if (scene.labels.empty()) {
        throw Error(ErrorCode::kSchemaViolation, "cannot sample a goal from an unlabeled scene");
      }
      Rng rng(derive_seed(goal_seed, 0x60a1));
      goal = Goal::object_level(scene.labels[rng.index(scene.labels.size())]);
    } else {
      goal = goal_from_json(goal_req, scene.grid);
    }

    auto session = std::make_shared<Session>();
    session->id = new_session_id();
    session->scene = scene;
    session->goal = *goal;
    session->model = options_.model;
    session->reveal_goal = req.value("reveal_goal", false);
    {
      Scene check = scene;
      check.goals = {*goal};
      check.validate();
    }
    session->goal_mask = goal_mask(scene, *goal);
    if (!session->model) {
      const auto exemplars = scene_exemplars(scene);
      if (exemplars.empty()) {
        throw Error(ErrorCode::kSchemaViolation, "scene has no labels and no model is loaded");
      }
      session->model = std::make_shared<const KnownObjects>(train(exemplars));
    }

    Json out = {{"id", session->id},
                {"scene", scene_to_json(scene)},
                {"reveal_goal", session->reveal_goal}};
    if (session->reveal_goal) out["goal"] = goal_to_json(*goal);
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(session->id, session);
    }
    return Response{201, dump_json(out)};
  });
}

Response SessionService::get_session(const std::string& id) const {
  return guarded([&] {
    const auto session = find(id);
    std::shared_lock lock(session->mutex);
    return Response{200, dump_json(session->to_json())};
  });
}

Response SessionService::post_gesture(const std::string& id, const std::string& body) {
  return guarded([&] {
    const auto session = find(id);
    const auto [action, t] = gesture_from_json(parse_json(body));

    std::unique_lock lock(session->mutex);
    GestureSequence history = session->gestures;
    const double when = t.value_or(history.empty() ? 0.0 : history.timestamps().back() + 1.0);
    history.append(action, when);

    std::optional<RankedPrediction> prediction;
    std::string reason;
    try {
      prediction = predict_foreground(session->scene, history, *session->model, options_.predict);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyRegion && e.code() != ErrorCode::kNoCandidates) throw;
      reason = std::string(error_code_name(e.code()));
    }

    session->gestures = std::move(history);
    session->latest = std::move(prediction);
    session->abstain_reason = reason;
    session->trace.push_back(nmse(session->goal_mask, session->current_prediction()));

    Json out = session->prediction_json();
    out["gesture"] = gesture_to_json(action, when);
    out["gesture_count"] = session->gestures.size();
    return Response{200, dump_json(out)};
  });
}

Response SessionService::post_reported(const std::string& id, const std::string& body) {
  return guarded([&] {
    const auto session = find(id);
    const Json req = parse_json(body);
    const Json& mask_json = req.is_object() && req.contains("mask") ? req.at("mask") : req;
    const ForegroundMap reported = mask_from_json(mask_json, session->scene.grid);

    std::unique_lock lock(session->mutex);
    const double err = nmse(reported, session->current_prediction());
    session->reported.push_back(err);
    return Response{200, dump_json({{"nmse", err}})};
  });
}

Response SessionService::generate_scene(const std::optional<std::string>& seed,
                                        const std::optional<std::string>& pieces) const {
  return guarded([&] {
    const int s = seed ? parse_int(*seed, "seed") : 0;
    const int n = pieces ? parse_int(*pieces, "n") : 5;
    return Response{200, dump_json(scene_to_json(jgs::generate_scene(
                             static_cast<std::uint64_t>(s), n)))};
  });
}

Json SessionService::snapshot() const {
  std::shared_lock lock(sessions_mutex_);
  Json out = Json::array();
  for (const auto& [id, session] : sessions_) {
    std::shared_lock session_lock(session->mutex);
    Json j = session->to_json();
    // Snapshots keep the goal even for hidden-goal sessions.
    j["goal"] = goal_to_json(session->goal);
    j["trace"] = session->trace;
    out.push_back(std::move(j));
  }
  return out;
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

struct HttpServer::Impl {
  SessionService& service;
  HttpOptions options;
  httplib::Server http;
  int port = -1;

  Impl(SessionService& s, HttpOptions o) : service(s), options(std::move(o)) {
    auto reply = [](httplib::Response& res, const Response& r) {
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    http.Post("/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.create_session(req.body));
    });
    http.Get(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req,
                                                   httplib::Response& res) {
      reply(res, service.get_session(req.matches[1]));
    });
    http.Post(R"(/sessions/([^/]+)/gestures)", [this, reply](const httplib::Request& req,
                                                             httplib::Response& res) {
      reply(res, service.post_gesture(req.matches[1], req.body));
    });
    http.Post(R"(/sessions/([^/]+)/reported)", [this, reply](const httplib::Request& req,
                                                             httplib::Response& res) {
      reply(res, service.post_reported(req.matches[1], req.body));
    });
    http.Get("/scenes/generate", [this, reply](const httplib::Request& req,
                                               httplib::Response& res) {
      auto param = [&](const char* key) -> std::optional<std::string> {
        if (!req.has_param(key)) return std::nullopt;
        return req.get_param_value(key);
      };
      reply(res, service.generate_scene(param("seed"), param("n")));
    });
    if (!options.static_dir.empty() && !http.set_mount_point("/", options.static_dir)) {
      throw Error(ErrorCode::kIo, "static directory '" + options.static_dir + "' not found");
    }
  }
};

HttpServer::HttpServer(SessionService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(impl_->options.host);
  } else if (impl_->http.bind_to_port(impl_->options.host, impl_->options.port)) {
    impl_->port = impl_->options.port;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + impl_->options.host + ":" +
                                    std::to_string(impl_->options.port));
  }
  return impl_->port;
}

void HttpServer::serve() { impl_->http.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

}  // namespace jgs::server
