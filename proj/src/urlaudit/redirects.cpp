#include "adaudit/urlaudit/redirects.hpp"

#include <regex>
#include <set>

#include "adaudit/common/url.hpp"

namespace adaudit::urlaudit {

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::final_200: return "final_200";
    case Termination::max_hops: return "max_hops";
    case Termination::timeout: return "timeout";
    case Termination::fetch_error: return "fetch_error";
  }
  return "fetch_error";
}

std::string_view to_string(HopVia v) noexcept { return v == HopVia::http_3xx ? "http_3xx" : "meta_refresh"; }

std::optional<std::string> meta_refresh_target(std::string_view html) {
  static const std::regex meta_tag(R"(<meta\b[^>]*>)", std::regex::icase);
  static const std::regex refresh(R"(http-equiv\s*=\s*["']?\s*refresh)", std::regex::icase);
  static const std::regex content(R"re(content\s*=\s*("([^"]*)"|'([^']*)'|([^\s>]+)))re", std::regex::icase);
  static const std::regex url_part(R"(^\s*\d*(\.\d*)?\s*[;,]?\s*url\s*=\s*(.*)$)", std::regex::icase);

  const std::string doc(html);
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), meta_tag); it != std::sregex_iterator(); ++it) {
    const std::string tag = it->str();
    if (!std::regex_search(tag, refresh)) continue;
    std::smatch c;
    if (!std::regex_search(tag, c, content)) continue;
    const std::string value = c[2].matched ? c[2].str() : c[3].matched ? c[3].str() : c[4].str();
    std::smatch u;
    if (!std::regex_match(value, u, url_part)) continue;
    std::string target = u[2].str();
    while (!target.empty() && (target.back() == ' ' || target.back() == '\t')) target.pop_back();
    if (target.size() >= 2 && (target.front() == '\'' || target.front() == '"') && target.back() == target.front())
      target = target.substr(1, target.size() - 2);
    if (!target.empty()) return target;
  }
  return std::nullopt;
}

RedirectChain resolve_redirects(const std::string& url, IsolatedFetcher& fetcher, int max_hops,
                                std::chrono::milliseconds timeout, const SteadyNow& now) {
  const auto clock = now ? now : SteadyNow([] { return std::chrono::steady_clock::now(); });
  const auto deadline = clock() + timeout;

  RedirectChain chain;
  chain.embedded_url = url;
  std::string current = url;
  while (true) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock());
    if (remaining.count() <= 0) {
      chain.terminated_by = Termination::timeout;
      break;
    }
    const FetchResponse resp = fetcher.fetch(current, remaining);
    if (resp.outcome == FetchOutcome::timeout) {
      chain.terminated_by = Termination::timeout;
      chain.error = resp.error;
      break;
    }
    if (resp.outcome == FetchOutcome::error) {
      chain.terminated_by = Termination::fetch_error;
      chain.error = resp.error;
      break;
    }
    chain.final_status = resp.status;

    std::optional<std::string> next;
    HopVia via = HopVia::http_3xx;
    if (resp.status >= 300 && resp.status < 400) {
      if (!resp.location) {
        chain.terminated_by = Termination::fetch_error;
        chain.error = "redirect without Location";
        break;
      }
      next = resolve_reference(current, *resp.location);
    } else if (resp.status >= 200 && resp.status < 300) {
      const auto target = meta_refresh_target(resp.body);
      if (!target) {
        chain.terminated_by = Termination::final_200;
        break;
      }
      via = HopVia::meta_refresh;
      next = resolve_reference(current, *target);
    } else {
      chain.terminated_by = Termination::fetch_error;
      chain.error = "HTTP " + std::to_string(resp.status);
      break;
    }
    if (!next) {
      chain.terminated_by = Termination::fetch_error;
      chain.error = "unusable redirect target";
      break;
    }
    if (static_cast<int>(chain.hops.size()) >= max_hops) {
      chain.terminated_by = Termination::max_hops;
      break;
    }
    chain.hops.push_back({*next, resp.status, via});
    current = *next;
  }
  chain.landing_url = current;
  return chain;
}

std::vector<std::string> extract_embedded_urls(const corpus::TweetRecord& record) {
  std::vector<std::string> out;
  std::set<std::string_view> seen;
  for (const auto& u : record.embedded_urls)
    if (seen.insert(u).second) out.push_back(u);
  return out;
}

}  // namespace adaudit::urlaudit
