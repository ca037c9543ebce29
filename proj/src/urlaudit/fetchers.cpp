#include "adaudit/urlaudit/fetchers.hpp"

#include <thread>

#include <httplib.h>

#include "adaudit/common/url.hpp"

namespace adaudit::urlaudit {

namespace {

time_t whole_seconds(std::chrono::milliseconds d) {
  return static_cast<time_t>(d.count() / 1000);
}

time_t micro_remainder(std::chrono::milliseconds d) {
  return static_cast<time_t>((d.count() % 1000) * 1000);
}

}  // namespace

HttpFetcher::HttpFetcher(HttpFetcherOptions options) : options_(std::move(options)) {}

FetchResponse HttpFetcher::fetch(const std::string& url, std::chrono::milliseconds timeout) {
  FetchResponse out;
  const auto parsed = parse_url(url);
  if (!parsed) {
    out.outcome = FetchOutcome::error;
    out.error = "not an http(s) URL";
    return out;
  }
  httplib::Client client(parsed->origin());
  client.set_follow_location(false);
  client.enable_server_certificate_verification(options_.verify_tls);
  client.set_connection_timeout(whole_seconds(timeout), micro_remainder(timeout));
  client.set_read_timeout(whole_seconds(timeout), micro_remainder(timeout));
  client.set_write_timeout(whole_seconds(timeout), micro_remainder(timeout));

  std::string target = parsed->path.empty() ? "/" : parsed->path;
  if (parsed->query) target += "?" + *parsed->query;
  httplib::Headers headers{{"User-Agent", options_.user_agent}};

  std::optional<int> status;
  std::optional<std::string> location;
  std::string body;
  const std::size_t cap = options_.max_body_bytes;
  auto res = client.Get(
      target, headers,
      [&](const httplib::Response& r) {
        status = r.status;
        if (r.has_header("Location")) location = r.get_header_value("Location");
        return true;
      },
      [&](const char* data, std::size_t len) {
        body.append(data, std::min(len, cap - body.size()));
        return body.size() < cap;
      });
  // Stopping at the body cap surfaces as Canceled after the headers arrived.
  if (!res && !(res.error() == httplib::Error::Canceled && status)) {
    const auto err = res.error();
    out.outcome = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) ? FetchOutcome::timeout
                                                                                            : FetchOutcome::error;
    out.error = httplib::to_string(err);
    return out;
  }
  out.status = *status;
  out.location = std::move(location);
  out.body = std::move(body);
  return out;
}

nlohmann::json fetch_to_json(const FetchResponse& r) {
  if (r.outcome != FetchOutcome::ok)
    return nlohmann::json{{"outcome", r.outcome == FetchOutcome::timeout ? "timeout" : "error"}, {"error", r.error}};
  nlohmann::json j{{"status", r.status}};
  if (r.location) j["location"] = *r.location;
  if (!r.body.empty()) j["body"] = r.body;
  return j;
}

FetchResponse fetch_from_json(const nlohmann::json& j) {
  FetchResponse r;
  const std::string outcome = j.value("outcome", "ok");
  if (outcome != "ok") {
    r.outcome = outcome == "timeout" ? FetchOutcome::timeout : FetchOutcome::error;
    r.error = j.value("error", outcome);
    return r;
  }
  r.status = j.value("status", 0);
  if (j.contains("location")) r.location = j["location"].get<std::string>();
  r.body = j.value("body", "");
  return r;
}

CassetteFetcher::CassetteFetcher(Cassette cassette) : cassette_(std::move(cassette)) {}

FetchResponse CassetteFetcher::fetch(const std::string& url, std::chrono::milliseconds) {
  const auto hit = cassette_.find("fetch:" + url);
  if (!hit) {
    FetchResponse miss;
    miss.outcome = FetchOutcome::error;
    miss.error = "CassetteMiss: " + url;
    return miss;
  }
  return fetch_from_json(*hit);
}

RecordingFetcher::RecordingFetcher(IsolatedFetcher& inner, Cassette cassette)
    : inner_(inner), cassette_(std::move(cassette)) {}

FetchResponse RecordingFetcher::fetch(const std::string& url, std::chrono::milliseconds timeout) {
  auto r = inner_.fetch(url, timeout);
  cassette_.put("fetch:" + url, fetch_to_json(r));
  return r;
}

PoliteFetcher::PoliteFetcher(IsolatedFetcher& inner, std::chrono::milliseconds per_host_delay, Sleeper sleeper)
    : inner_(inner),
      delay_(per_host_delay),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })) {}

FetchResponse PoliteFetcher::fetch(const std::string& url, std::chrono::milliseconds timeout) {
  const auto parsed = parse_url(url);
  const std::string host = parsed ? parsed->origin() : url;
  std::chrono::milliseconds wait{0};
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    auto& slot = next_slot_[host];
    const auto start = std::max(slot, now);
    wait = std::chrono::duration_cast<std::chrono::milliseconds>(start - now);
    slot = start + delay_;
  }
  if (wait.count() > 0) sleeper_(wait);
  return inner_.fetch(url, timeout);
}

}  // namespace adaudit::urlaudit
