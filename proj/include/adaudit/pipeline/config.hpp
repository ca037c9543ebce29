#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaudit/clusterlab/grid.hpp"
#include "adaudit/common/service.hpp"
#include "adaudit/common/time.hpp"
#include "adaudit/corpus/tweet.hpp"

namespace adaudit::pipeline {

struct ServiceConfig {
  std::string base_url;
  std::string api_key_env;  // name of the environment variable holding the key
  std::chrono::milliseconds timeout{30000};
};

struct AuditConfig {
  std::filesystem::path config_dir;  // relative paths resolve against this
  nlohmann::json raw;                // as written; hashed into the run id

  // inputs
  std::filesystem::path stream;
  std::filesystem::path rehydrated;
  std::optional<std::filesystem::path> calibration_labels;  // CSV tweet_id,label
  std::optional<std::filesystem::path> false_positives;     // one tweet id per line
  std::optional<std::filesystem::path> lexicon;

  corpus::AdSourceSet ad_sources;
  std::set<std::string> no_translate{"en"};
  std::chrono::milliseconds rehydration_window = std::chrono::days{14};
  bool strict_window = true;
  Timestamp collection_start{};
  std::size_t late_removed_ads = 0;

  double explicit_threshold = 0.3;
  bool apply_calibrated_threshold = false;
  int calibration_per_bin = 50;
  double calibration_bin_width = 0.1;
  std::uint64_t calibration_seed = 1;

  double dbcv_floor = clusterlab::kDefaultDbcvFloor;
  clusterlab::GridBounds cluster_grid;
  int reduce_dim = 128;
  std::uint64_t reduction_seed = 1;
  double similarity_floor = 0.5;
  std::uint64_t community_seed = 1;
  std::size_t blind_sample_size = 100;
  std::uint64_t blind_seed = 1;
  unsigned cluster_workers = 0;

  int url_threshold = 3;
  int max_hops = 10;
  std::chrono::milliseconds url_timeout{30000};
  unsigned url_workers = 4;
  std::chrono::milliseconds politeness_delay{1000};

  std::vector<std::string> annotators{"a1", "a2", "a3", "a4"};
  std::uint64_t annotation_seed = 1;
  std::size_t adult_sample = 200;

  ServiceMode service_mode = ServiceMode::replay;
  std::optional<std::filesystem::path> cassette_dir;  // per-service subdirectories
  ServiceConfig explicit_service{"https://commentanalyzer.googleapis.com", "PERSPECTIVE_API_KEY", std::chrono::milliseconds{30000}};
  std::string explicit_attribute = "SEXUALLY_EXPLICIT";
  ServiceConfig translate_service{"https://translation.googleapis.com", "GOOGLE_TRANSLATE_API_KEY", std::chrono::milliseconds{30000}};
  ServiceConfig embedding_service{"http://127.0.0.1:8081", "", std::chrono::milliseconds{30000}};
  std::string embedding_model = "distiluse-base-multilingual-cased-v2";
  ServiceConfig reputation_service{"https://www.virustotal.com", "VT_API_KEY", std::chrono::milliseconds{30000}};
};

/// Reads a JSON config. Throws config_invalid on unknown keys, bad values or
/// out-of-range thresholds.
AuditConfig load_config(const std::filesystem::path& path);
AuditConfig parse_config(const nlohmann::json& j, const std::filesystem::path& config_dir);

/// Switches every service to replay from `dir`.
void force_replay(AuditConfig& config, const std::filesystem::path& dir);

/// Endpoint with the API key read from the environment (empty if unset).
HttpEndpoint endpoint_for(const ServiceConfig& service);

/// JsonService for the named cassette subdirectory.
JsonService make_service(const AuditConfig& config, const ServiceConfig& service, const std::string& cassette_subdir);

}  // namespace adaudit::pipeline
