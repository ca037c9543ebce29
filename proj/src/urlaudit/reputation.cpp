#include "adaudit/urlaudit/reputation.hpp"

#include "adaudit/common/hash.hpp"
#include "adaudit/common/url.hpp"

namespace adaudit::urlaudit {

VirusTotalClient::VirusTotalClient(JsonService service) : service_(std::move(service)) {}

ReputationCounts VirusTotalClient::lookup(const std::string& canonical_url) {
  HttpCall call;
  call.path = "/api/v3/urls/" + base64url(canonical_url);
  if (service_.endpoint()) call.headers.emplace_back("x-apikey", service_.endpoint()->api_key);
  const auto reply = service_.call(canonical_url, call);
  if (reply.status == 404) return ReputationCounts{0, 0, false};
  if (reply.status != 200) fail(Errc::service_unavailable, "reputation service returned HTTP " + std::to_string(reply.status));

  const auto ptr = nlohmann::json::json_pointer("/data/attributes/last_analysis_stats");
  if (!reply.body.is_object() || !reply.body.contains(ptr))
    fail(Errc::service_unavailable, "reputation reply lacks last_analysis_stats");
  const auto& stats = reply.body.at(ptr);
  ReputationCounts c{stats.value("malicious", 0), stats.value("suspicious", 0), true};
  require(c.malicious >= 0 && c.suspicious >= 0, "negative reputation counts for " + canonical_url);
  return c;
}

ReputationCounts reputation_lookup(const std::string& url, ReputationClient& client) {
  return client.lookup(canonicalize_url(url));
}

}  // namespace adaudit::urlaudit
