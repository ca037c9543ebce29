#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::urlaudit {

inline constexpr int kDefaultMaxHops = 10;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

enum class FetchOutcome { ok, timeout, error };

/// One GET without redirect following.
struct FetchResponse {
  FetchOutcome outcome = FetchOutcome::ok;
  int status = 0;
  std::optional<std::string> location;
  std::string body;   // may be truncated; only scanned for meta refresh
  std::string error;  // set when outcome != ok
};

/// Fetches a single URL in an isolated environment. Implementations must not
/// follow redirects themselves and must send the URL byte for byte.
class IsolatedFetcher {
 public:
  virtual ~IsolatedFetcher() = default;
  virtual FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) = 0;
};

enum class Termination { final_200, max_hops, timeout, fetch_error };
enum class HopVia { http_3xx, meta_refresh };

std::string_view to_string(Termination t) noexcept;
std::string_view to_string(HopVia v) noexcept;

/// `url` is where the hop leads; `status` is the response that issued it.
struct Hop {
  std::string url;
  int status = 0;
  HopVia via = HopVia::http_3xx;

  bool operator==(const Hop&) const = default;
};

struct RedirectChain {
  std::string embedded_url;
  std::vector<Hop> hops;
  std::string landing_url;  // last URL requested
  Termination terminated_by = Termination::fetch_error;
  std::optional<int> final_status;  // status of the last response, if one arrived
  std::string error;

  std::size_t hop_count() const { return hops.size(); }
};

using SteadyNow = std::function<std::chrono::steady_clock::time_point()>;

/// Follows 3xx Location headers and <meta http-equiv="refresh"> targets.
/// `timeout` bounds the whole chain. Failures end up in terminated_by.
RedirectChain resolve_redirects(const std::string& url, IsolatedFetcher& fetcher, int max_hops = kDefaultMaxHops,
                                std::chrono::milliseconds timeout = kDefaultTimeout, const SteadyNow& now = {});

/// Target of the first meta refresh tag in `html`, as written.
std::optional<std::string> meta_refresh_target(std::string_view html);

/// record.embedded_urls without repeats, first occurrence kept.
std::vector<std::string> extract_embedded_urls(const corpus::TweetRecord& record);

}  // namespace adaudit::urlaudit
