#pragma once

#include <string>

#include "adaudit/common/service.hpp"

namespace adaudit::urlaudit {

/// Engine tallies for one URL. `scanned` is false when the service has no
/// report; the counts are then (0,0) but must not be read as "safe".
struct ReputationCounts {
  int malicious = 0;
  int suspicious = 0;
  bool scanned = true;

  bool operator==(const ReputationCounts&) const = default;
};

class ReputationClient {
 public:
  virtual ~ReputationClient() = default;
  /// `canonical_url` is already canonicalized.
  virtual ReputationCounts lookup(const std::string& canonical_url) = 0;
};

/// URL report lookup: GET /api/v3/urls/<base64url(url)> with header x-apikey.
/// Reads data.attributes.last_analysis_stats.{malicious,suspicious}; HTTP 404
/// means the URL was never scanned. Cassette key: the canonical URL.
class VirusTotalClient final : public ReputationClient {
 public:
  explicit VirusTotalClient(JsonService service);
  ReputationCounts lookup(const std::string& canonical_url) override;

 private:
  JsonService service_;
};

/// Canonicalizes `url` and asks the client.
ReputationCounts reputation_lookup(const std::string& url, ReputationClient& client);

}  // namespace adaudit::urlaudit
