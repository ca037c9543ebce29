#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "adaudit/annotate/session.hpp"
#include "adaudit/common/error.hpp"

namespace httplib {
class Server;
}

namespace adaudit::annotate {

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// JSON API over a SessionStore.
///
///   GET  /sessions/:id                     status and per-annotator progress
///   GET  /sessions/:id/next?annotator=A    {"task": {...} | null, "progress": {...}}
///   POST /labels                           {"session_id","annotator","task_id","label"} -> 201 ack
///   GET  /sessions/:id/agreement           agreement report, 409 until complete
///   GET  /sessions/:id/export.csv          task_id,tweet_id,annotator,label,labeled_at
///
/// Errors are {"error": <code name>, "message": <text>} with 400 for
/// malformed requests, 404 UnknownSession/UnknownTask, 409 AlreadyLabeled or
/// Incomplete, 422 LabelNotInChoiceSet or KappaUndefined.
class AnnotationApi {
 public:
  explicit AnnotationApi(SessionStore& store);

  ApiResponse dispatch(const ApiRequest& request) const;

  /// Routes every GET/POST on `server` through dispatch(); optionally serves a
  /// static UI bundle under /ui.
  void mount(httplib::Server& server, const std::optional<std::filesystem::path>& ui_dir = std::nullopt) const;

 private:
  SessionStore& store_;
};

nlohmann::json to_json(const AnnotationTask& task);
nlohmann::json to_json(const AgreementReport& report);
nlohmann::json to_json(const SessionStatus& status);

/// HTTP status for an error code as used by the API.
int http_status_for(Errc code);

}  // namespace adaudit::annotate
