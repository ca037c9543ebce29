#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaudit/common/cassette.hpp"
#include "adaudit/common/error.hpp"

namespace adaudit {

/// live: network only; record: network, then store; replay: cassette only (no network).
enum class ServiceMode { live, record, replay };

std::optional<ServiceMode> parse_service_mode(std::string_view text);

struct HttpEndpoint {
  std::string base_url;  // e.g. "https://commentanalyzer.googleapis.com"
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Runs `fn`, retrying while it throws Errc::service_unavailable. The last
/// failure propagates once the attempt budget is spent.
template <class F>
auto with_retry(const RetryPolicy& policy, const Sleeper& sleep, F&& fn) -> decltype(fn()) {
  auto delay = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() != Errc::service_unavailable || attempt >= policy.max_attempts) throw;
    }
    if (sleep) sleep(delay);
    delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
  }
}

struct HttpCall {
  std::string method = "GET";  // GET or POST
  std::string path;            // path + query, appended to the endpoint base
  std::optional<nlohmann::json> body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct ServiceReply {
  int status = 0;
  nlohmann::json body;
};

/// A JSON-over-HTTP service with cassette record/replay. Status 429 raises
/// quota_exceeded; transport failures and 5xx raise service_unavailable and
/// are retried per the policy. Other statuses are returned to the caller.
class JsonService {
 public:
  JsonService(ServiceMode mode, std::optional<Cassette> cassette, std::optional<HttpEndpoint> endpoint,
              RetryPolicy retry = {}, Sleeper sleeper = {});

  ServiceReply call(std::string_view key, const HttpCall& request) const;
  ServiceMode mode() const { return mode_; }
  const std::optional<HttpEndpoint>& endpoint() const { return endpoint_; }

 private:
  ServiceReply perform(const HttpCall& request) const;

  ServiceMode mode_;
  std::optional<Cassette> cassette_;
  std::optional<HttpEndpoint> endpoint_;
  RetryPolicy retry_;
  Sleeper sleeper_;
};

}  // namespace adaudit
