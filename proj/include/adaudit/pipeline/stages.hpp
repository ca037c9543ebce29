#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaudit/annotate/session.hpp"
#include "adaudit/pipeline/config.hpp"

namespace adaudit::pipeline {

enum class Stage { ingest, rehydrate, score, calibrate, cluster, urls, annotate_export, report };

inline constexpr Stage kAllStages[] = {Stage::ingest,  Stage::rehydrate, Stage::score,           Stage::calibrate,
                                       Stage::cluster, Stage::urls,      Stage::annotate_export, Stage::report};

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> parse_stage(std::string_view text);

/// Stages whose receipts must exist before `stage` may run.
std::vector<Stage> upstream_of(Stage stage);

struct StageReceipt {
  Stage stage = Stage::ingest;
  std::string run_id;
  std::string config_hash;
  std::map<std::string, std::string> inputs;    // input name -> sha256
  std::map<std::string, std::string> upstream;  // stage -> digest of its outputs
  std::map<std::string, std::string> outputs;   // path relative to the stage dir -> sha256
  std::map<std::string, std::size_t> rows;      // CSV/JSONL data rows per output
  std::string completed_at;
  bool reused = false;  // not persisted; true when the stage was skipped

  /// Digest over `outputs`, used by downstream receipts.
  std::string output_digest() const;
};

nlohmann::json to_json(const StageReceipt& r);
StageReceipt receipt_from_json(const nlohmann::json& j);

struct RunOptions {
  bool force = false;
  annotate::Clock clock;  // receipt timestamps; defaults to the system clock
  std::optional<std::string> log_prefix;
};

/// Stage runner over a content-addressed run directory:
///
///   <workdir>/runs/<run_id>/<stage>/...      stage outputs
///   <workdir>/runs/<run_id>/<stage>/receipt.json
///
/// run_id is the first 16 hex digits of sha256 over the config as written
/// plus the hashes of every input file.
class Pipeline {
 public:
  Pipeline(AuditConfig config, std::filesystem::path workdir, RunOptions options = {});

  const std::string& run_id() const { return run_id_; }
  std::filesystem::path run_dir() const;
  std::filesystem::path stage_dir(Stage stage) const;
  const AuditConfig& config() const { return config_; }

  std::optional<StageReceipt> receipt(Stage stage) const;

  /// Throws missing_upstream if an upstream receipt is absent. Skips the
  /// stage when its receipt still matches, unless options.force.
  StageReceipt run_stage(Stage stage);
  std::vector<StageReceipt> full_run();

 private:
  bool receipt_current(const StageReceipt& r, const std::map<std::string, std::string>& upstream) const;

  AuditConfig config_;
  std::filesystem::path workdir_;
  RunOptions options_;
  std::map<std::string, std::string> input_hashes_;
  std::string config_hash_;
  std::string run_id_;
};

}  // namespace adaudit::pipeline
