#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "jgs/json.hpp"
#include "jgs/recognition.hpp"

// Session API for interactive joint guided search. SessionService holds the
// semantics and is usable without a socket; HttpServer maps it onto routes:
//   POST /sessions                  create a session
//   GET  /sessions/{id}             snapshot
//   POST /sessions/{id}/gestures    add a gesture, returns the new prediction
//   POST /sessions/{id}/reported    score a reported foreground
//   GET  /scenes/generate?seed&n    generated scene
namespace jgs::server {

struct Response {
  int status = 200;
  std::string body;
};

struct ServiceOptions {
  /// Shared model; when absent each session trains on its own scene labels.
  std::shared_ptr<const KnownObjects> model;
  PredictConfig predict;
};

class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});
  ~SessionService();

  Response create_session(const std::string& body);
  Response get_session(const std::string& id) const;
  Response post_gesture(const std::string& id, const std::string& body);
  Response post_reported(const std::string& id, const std::string& body);
  Response generate_scene(const std::optional<std::string>& seed,
                          const std::optional<std::string>& pieces) const;

  /// Every session, for persisting on shutdown.
  Json snapshot() const;
  std::size_t session_count() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct HttpOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  /// Mounted at "/" when non-empty.
  std::string static_dir;
};

class HttpServer {
 public:
  HttpServer(SessionService& service, HttpOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; returns the bound port. Throws kIo on failure.
  int bind();
  /// Blocks serving requests until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace jgs::server
