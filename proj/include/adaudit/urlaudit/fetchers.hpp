#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "adaudit/common/cassette.hpp"
#include "adaudit/common/service.hpp"
#include "adaudit/urlaudit/redirects.hpp"

namespace adaudit::urlaudit {

struct HttpFetcherOptions {
  std::string user_agent = "Mozilla/5.0 (X11; Linux x86_64) adaudit-crawler";
  std::size_t max_body_bytes = 64 * 1024;
  bool verify_tls = false;  // landing pages of interest often carry broken certificates
};

/// Plain GET via cpp-httplib with redirect following disabled.
class HttpFetcher final : public IsolatedFetcher {
 public:
  explicit HttpFetcher(HttpFetcherOptions options = {});
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;

 private:
  HttpFetcherOptions options_;
};

/// Cassette entry for key "fetch:<url>": {"status": int, "location": str?, "body": str?}
/// or {"outcome": "timeout"|"error", "error": str}. A miss is a fetch error.
class CassetteFetcher final : public IsolatedFetcher {
 public:
  explicit CassetteFetcher(Cassette cassette);
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;

 private:
  Cassette cassette_;
};

/// Forwards to `inner` and stores every response in the cassette.
class RecordingFetcher final : public IsolatedFetcher {
 public:
  RecordingFetcher(IsolatedFetcher& inner, Cassette cassette);
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;

 private:
  IsolatedFetcher& inner_;
  Cassette cassette_;
};

/// Enforces a minimum spacing between requests to the same host. Safe to
/// share between worker threads.
class PoliteFetcher final : public IsolatedFetcher {
 public:
  PoliteFetcher(IsolatedFetcher& inner, std::chrono::milliseconds per_host_delay, Sleeper sleeper = {});
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;

 private:
  IsolatedFetcher& inner_;
  std::chrono::milliseconds delay_;
  Sleeper sleeper_;
  std::mutex mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

nlohmann::json fetch_to_json(const FetchResponse& r);
FetchResponse fetch_from_json(const nlohmann::json& j);

}  // namespace adaudit::urlaudit
