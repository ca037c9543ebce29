#pragma once

// Helpers shared by the stage implementations.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaudit/corpus/tweet.hpp"
#include "adaudit/explicitness/scoring.hpp"
#include "adaudit/pipeline/stages.hpp"

namespace adaudit::pipeline::detail {

struct StageContext {
  const AuditConfig& config;
  std::filesystem::path run_dir;
  std::filesystem::path out;  // this stage's directory, empty on entry

  std::filesystem::path upstream(Stage s, const std::string& file) const { return run_dir / std::string(to_string(s)) / file; }
};

void write_jsonl(const std::filesystem::path& path, const std::vector<corpus::TweetRecord>& records);
std::vector<corpus::TweetRecord> read_jsonl(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

std::vector<explicitness::ExplicitScore> read_scores(const std::filesystem::path& path);
std::set<std::string> read_id_list(const std::filesystem::path& path);
/// tweet_id,label with label in {1,0,true,false,adult,not_adult}
std::map<std::string, bool> read_binary_labels(const std::filesystem::path& path);
/// tweet_id -> "retained" / "removed"
std::map<std::string, std::string> read_statuses(const std::filesystem::path& path);

std::string yes_no(bool b);

void run_ingest(const StageContext& ctx);
void run_rehydrate(const StageContext& ctx);
void run_score(const StageContext& ctx);
void run_calibrate(const StageContext& ctx);
void run_cluster(const StageContext& ctx);
void run_urls(const StageContext& ctx);
void run_annotate_export(const StageContext& ctx);
void run_report(const StageContext& ctx);

}  // namespace adaudit::pipeline::detail
