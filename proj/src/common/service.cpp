#include "adaudit/common/service.hpp"

#include <httplib.h>

#include <thread>

namespace adaudit {

std::optional<ServiceMode> parse_service_mode(std::string_view text) {
  if (text == "live") return ServiceMode::live;
  if (text == "record") return ServiceMode::record;
  if (text == "replay") return ServiceMode::replay;
  return std::nullopt;
}

JsonService::JsonService(ServiceMode mode, std::optional<Cassette> cassette, std::optional<HttpEndpoint> endpoint,
                         RetryPolicy retry, Sleeper sleeper)
    : mode_(mode),
      cassette_(std::move(cassette)),
      endpoint_(std::move(endpoint)),
      retry_(retry),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })) {
  if (mode_ != ServiceMode::live && !cassette_) fail(Errc::config_invalid, "cassette directory required for replay/record");
  if (mode_ != ServiceMode::replay && !endpoint_) fail(Errc::config_invalid, "endpoint required for live/record");
}

ServiceReply JsonService::call(std::string_view key, const HttpCall& request) const {
  if (mode_ == ServiceMode::replay) {
    auto hit = cassette_->find(key);
    if (!hit) fail(Errc::cassette_miss, std::string(key));
    return ServiceReply{hit->value("status", 0), hit->value("body", nlohmann::json{})};
  }
  ServiceReply reply = with_retry(retry_, sleeper_, [&] { return perform(request); });
  if (mode_ == ServiceMode::record) cassette_->put(key, nlohmann::json{{"status", reply.status}, {"body", reply.body}});
  return reply;
}

ServiceReply JsonService::perform(const HttpCall& request) const {
  httplib::Client client(endpoint_->base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_->timeout).count();
  client.set_connection_timeout(static_cast<time_t>(std::max<long long>(1, secs)));
  client.set_read_timeout(static_cast<time_t>(std::max<long long>(1, secs)));
  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);

  httplib::Result res = request.method == "POST"
                            ? client.Post(request.path, headers, request.body ? request.body->dump() : std::string("{}"),
                                          "application/json")
                            : client.Get(request.path, headers);
  if (!res) fail(Errc::service_unavailable, endpoint_->base_url + ": " + httplib::to_string(res.error()));
  if (res->status == 429) fail(Errc::quota_exceeded, endpoint_->base_url + request.path);
  if (res->status >= 500) fail(Errc::service_unavailable, endpoint_->base_url + ": HTTP " + std::to_string(res->status));
  ServiceReply reply;
  reply.status = res->status;
  reply.body = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.body.is_discarded()) reply.body = res->body;
  return reply;
}

}  // namespace adaudit
