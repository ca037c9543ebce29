#include "adaudit/annotate/api.hpp"

#include <regex>
#include <sstream>

#include <httplib.h>

#include "adaudit/common/error.hpp"

namespace adaudit::annotate {

using nlohmann::json;

nlohmann::json to_json(const AnnotationTask& task) {
  return json{{"task_id", task.task_id},
              {"kind", to_string(task.kind)},
              {"tweet_id", task.tweet_id},
              {"presented_text", task.presented_text},
              {"choice_set", task.choice_set}};
}

nlohmann::json to_json(const AgreementReport& report) {
  return json{{"n_items", report.n_items},
              {"n_annotators", report.n_annotators},
              {"percent_agreement", report.percent_agreement},
              {"pairwise_agreement", report.pairwise_agreement},
              {"fleiss_kappa", report.fleiss_kappa},
              {"per_category_marginals", report.per_category_marginals}};
}

nlohmann::json to_json(const SessionStatus& status) {
  json annotators = json::array();
  for (const auto& a : status.annotators)
    annotators.push_back({{"annotator", a.annotator}, {"done", a.done}, {"total", a.total}});
  return json{{"session_id", status.session_id},
              {"kind", to_string(status.kind)},
              {"n_items", status.n_items},
              {"annotators", annotators},
              {"pending", status.pending},
              {"complete", status.complete()}};
}

int http_status_for(Errc code) {
  switch (code) {
    case Errc::unknown_session:
    case Errc::unknown_task: return 404;
    case Errc::already_labeled:
    case Errc::incomplete:
    case Errc::duplicate_session: return 409;
    case Errc::label_not_in_choice_set:
    case Errc::kappa_undefined: return 422;
    case Errc::precondition:
    case Errc::malformed_record: return 400;
    default: return 500;
  }
}

namespace {

ApiResponse json_reply(int status, const json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_reply(int status, std::string_view code, std::string_view message) {
  return json_reply(status, json{{"error", code}, {"message", message}});
}

}  // namespace

AnnotationApi::AnnotationApi(SessionStore& store) : store_(store) {}

ApiResponse AnnotationApi::dispatch(const ApiRequest& req) const {
  static const std::regex session_route(R"(^/sessions/([A-Za-z0-9_-]+)(/next|/agreement|/export\.csv)?/?$)");
  try {
    if (req.method == "POST" && req.path == "/labels") {
      const json body = json::parse(req.body, nullptr, false);
      if (!body.is_object()) return error_reply(400, "MalformedRequest", "body must be a JSON object");
      for (const char* field : {"session_id", "annotator", "task_id", "label"})
        if (!body.contains(field) || !body[field].is_string())
          return error_reply(400, "MalformedRequest", std::string("missing string field ") + field);
      const auto e = store_.submit_label(body["session_id"], body["annotator"], body["task_id"], body["label"]);
      return json_reply(201, json{{"ack", {{"session_id", body["session_id"]},
                                           {"annotator", e.annotator},
                                           {"task_id", e.task_id},
                                           {"label", e.label},
                                           {"labeled_at", format_timestamp(e.labeled_at)}}}});
    }

    std::smatch m;
    if (req.method == "GET" && std::regex_match(req.path, m, session_route)) {
      const std::string id = m[1].str();
      const std::string tail = m[2].str();
      if (tail.empty()) return json_reply(200, to_json(store_.status(id)));
      if (tail == "/next") {
        const auto a = req.query.find("annotator");
        if (a == req.query.end() || a->second.empty())
          return error_reply(400, "MalformedRequest", "annotator query parameter required");
        const auto task = store_.next_task(id, a->second);
        const auto p = store_.progress(id, a->second);
        return json_reply(200, json{{"task", task ? to_json(*task) : json(nullptr)},
                                    {"progress", {{"done", p.done}, {"total", p.total}}}});
      }
      if (tail == "/agreement") return json_reply(200, to_json(store_.agreement(id)));
      std::ostringstream csv;
      store_.export_csv(id, csv);
      return {200, "text/csv", csv.str()};
    }
    return error_reply(404, "NotFound", req.method + " " + req.path);
  } catch (const Error& e) {
    return error_reply(http_status_for(e.code()), to_string(e.code()), e.what());
  }
}

void AnnotationApi::mount(httplib::Server& server, const std::optional<std::filesystem::path>& ui_dir) const {
  if (ui_dir) server.set_mount_point("/ui", ui_dir->string());
  const auto handle = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) api.query.emplace(k, v);
    const auto out = dispatch(api);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(".*", handle);
  server.Post(".*", handle);
}

}  // namespace adaudit::annotate
