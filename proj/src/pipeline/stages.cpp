#include "adaudit/pipeline/stages.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/common/hash.hpp"
#include "adaudit/corpus/parse.hpp"
#include "stage_io.hpp"

namespace adaudit::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::rehydrate: return "rehydrate";
    case Stage::score: return "score";
    case Stage::calibrate: return "calibrate";
    case Stage::cluster: return "cluster";
    case Stage::urls: return "urls";
    case Stage::annotate_export: return "annotate-export";
    case Stage::report: return "report";
  }
  return "ingest";
}

std::optional<Stage> parse_stage(std::string_view text) {
  for (Stage s : kAllStages)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::vector<Stage> upstream_of(Stage stage) {
  switch (stage) {
    case Stage::ingest: return {};
    case Stage::rehydrate: return {Stage::ingest};
    case Stage::score: return {Stage::ingest};
    case Stage::calibrate: return {Stage::score, Stage::rehydrate};
    case Stage::cluster: return {Stage::calibrate};
    case Stage::urls: return {Stage::rehydrate, Stage::score};
    case Stage::annotate_export: return {Stage::calibrate, Stage::cluster, Stage::urls};
    case Stage::report:
      return {Stage::ingest, Stage::rehydrate, Stage::score, Stage::calibrate, Stage::cluster, Stage::urls};
  }
  return {};
}

std::string StageReceipt::output_digest() const {
  std::string acc;
  for (const auto& [path, hash] : outputs) acc += path + '\0' + hash + '\n';
  return sha256_hex(acc);
}

json to_json(const StageReceipt& r) {
  return json{{"stage", to_string(r.stage)}, {"run_id", r.run_id},   {"config_hash", r.config_hash},
              {"inputs", r.inputs},          {"upstream", r.upstream}, {"outputs", r.outputs},
              {"rows", r.rows},              {"completed_at", r.completed_at}};
}

StageReceipt receipt_from_json(const json& j) {
  StageReceipt r;
  const auto stage = parse_stage(j.at("stage").get<std::string>());
  if (!stage) fail(Errc::malformed_record, "receipt names an unknown stage");
  r.stage = *stage;
  r.run_id = j.at("run_id");
  r.config_hash = j.at("config_hash");
  r.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  r.upstream = j.at("upstream").get<std::map<std::string, std::string>>();
  r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  r.rows = j.at("rows").get<std::map<std::string, std::size_t>>();
  r.completed_at = j.value("completed_at", "");
  return r;
}

namespace {

std::string hash_tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file())
        files.emplace_back(fs::relative(e.path(), dir).generic_string(), sha256_file_hex(e.path()));
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const auto& [p, h] : files) acc += p + '\0' + h + '\n';
  return sha256_hex(acc);
}

std::size_t count_rows(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext != ".csv" && ext != ".jsonl") return 0;
  std::ifstream in(path, std::ios::binary);
  std::size_t lines = 0;
  if (ext == ".csv") {
    const auto table = read_csv(path);
    return table.rows.size();
  }
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  return lines;
}

}  // namespace

Pipeline::Pipeline(AuditConfig config, fs::path workdir, RunOptions options)
    : config_(std::move(config)), workdir_(std::move(workdir)), options_(std::move(options)) {
  if (!options_.clock)
    options_.clock = [] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); };

  const auto add_input = [&](const std::string& name, const fs::path& p) {
    if (!fs::exists(p)) fail(Errc::config_invalid, fmt::format("input {} not found: {}", name, p.string()));
    input_hashes_[name] = sha256_file_hex(p);
  };
  add_input("stream", config_.stream);
  add_input("rehydrated", config_.rehydrated);
  if (config_.calibration_labels) add_input("calibration_labels", *config_.calibration_labels);
  if (config_.false_positives) add_input("false_positives", *config_.false_positives);
  if (config_.lexicon) add_input("lexicon", *config_.lexicon);
  if (config_.service_mode == ServiceMode::replay && config_.cassette_dir)
    input_hashes_["cassettes"] = hash_tree(*config_.cassette_dir);

  config_hash_ = sha256_hex(config_.raw.dump());
  std::string acc = config_hash_ + '\n';
  for (const auto& [k, v] : input_hashes_) acc += k + '\0' + v + '\n';
  run_id_ = sha256_hex(acc).substr(0, 16);
}

fs::path Pipeline::run_dir() const { return workdir_ / "runs" / run_id_; }

fs::path Pipeline::stage_dir(Stage stage) const { return run_dir() / std::string(to_string(stage)); }

std::optional<StageReceipt> Pipeline::receipt(Stage stage) const {
  const fs::path p = stage_dir(stage) / "receipt.json";
  if (!fs::exists(p)) return std::nullopt;
  std::ifstream in(p);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return receipt_from_json(j);
}

bool Pipeline::receipt_current(const StageReceipt& r, const std::map<std::string, std::string>& upstream) const {
  if (r.run_id != run_id_ || r.config_hash != config_hash_ || r.inputs != input_hashes_ || r.upstream != upstream)
    return false;
  for (const auto& [rel, hash] : r.outputs) {
    const fs::path p = stage_dir(r.stage) / rel;
    if (!fs::exists(p) || sha256_file_hex(p) != hash) return false;
  }
  return true;
}

StageReceipt Pipeline::run_stage(Stage stage) {
  // Every ancestor counts, so a rerun of ingest invalidates report even when
  // the stages in between were not rerun yet.
  std::set<Stage> ancestors;
  for (std::vector<Stage> frontier = upstream_of(stage); !frontier.empty();) {
    const Stage s = frontier.back();
    frontier.pop_back();
    if (!ancestors.insert(s).second) continue;
    for (Stage up : upstream_of(s)) frontier.push_back(up);
  }
  std::map<std::string, std::string> upstream;
  for (Stage up : ancestors) {
    const auto r = receipt(up);
    if (!r)
      fail(Errc::missing_upstream,
           fmt::format("stage {} needs {} to run first (run {})", to_string(stage), to_string(up), run_id_));
    upstream[std::string(to_string(up))] = r->output_digest();
  }

  if (!options_.force)
    if (auto existing = receipt(stage); existing && receipt_current(*existing, upstream)) {
      existing->reused = true;
      if (options_.log_prefix) std::cerr << *options_.log_prefix << to_string(stage) << ": up to date\n";
      return *existing;
    }

  const fs::path out = stage_dir(stage);
  fs::remove_all(out);
  fs::create_directories(out);
  const detail::StageContext ctx{config_, run_dir(), out};
  switch (stage) {
    case Stage::ingest: detail::run_ingest(ctx); break;
    case Stage::rehydrate: detail::run_rehydrate(ctx); break;
    case Stage::score: detail::run_score(ctx); break;
    case Stage::calibrate: detail::run_calibrate(ctx); break;
    case Stage::cluster: detail::run_cluster(ctx); break;
    case Stage::urls: detail::run_urls(ctx); break;
    case Stage::annotate_export: detail::run_annotate_export(ctx); break;
    case Stage::report: detail::run_report(ctx); break;
  }

  StageReceipt r;
  r.stage = stage;
  r.run_id = run_id_;
  r.config_hash = config_hash_;
  r.inputs = input_hashes_;
  r.upstream = upstream;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), out).generic_string();
    r.outputs[rel] = sha256_file_hex(e.path());
    if (const auto n = count_rows(e.path()); n > 0 || e.path().extension() == ".csv") r.rows[rel] = n;
  }
  r.completed_at = format_timestamp(options_.clock());
  detail::write_json(out / "receipt.json", to_json(r));
  if (options_.log_prefix) std::cerr << *options_.log_prefix << to_string(stage) << ": done\n";
  return r;
}

std::vector<StageReceipt> Pipeline::full_run() {
  std::vector<StageReceipt> out;
  for (Stage s : kAllStages) out.push_back(run_stage(s));
  return out;
}

namespace detail {

void write_jsonl(const fs::path& path, const std::vector<corpus::TweetRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  for (const auto& r : records) out << corpus::serialize_tweet(r) << '\n';
}

std::vector<corpus::TweetRecord> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read " + path.string());
  return corpus::parse_tweet_stream(in, corpus::Strictness::strict).records;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read " + path.string());
  return json::parse(in);
}

std::vector<explicitness::ExplicitScore> read_scores(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = t.column("tweet_id"), sc = t.column("score"), tr = t.column("translated");
  std::vector<explicitness::ExplicitScore> out;
  for (const auto& row : t.rows) out.push_back({row[id], std::stod(row[sc]), row[tr] == "1", {}});
  return out;
}

std::set<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot read " + path.string());
  std::set<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    std::istringstream fields(line);
    std::string id;
    if ((fields >> id) && id.front() != '#') ids.insert(id);
  }
  return ids;
}

std::map<std::string, bool> read_binary_labels(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = t.column("tweet_id"), lab = t.column("label");
  std::map<std::string, bool> out;
  for (const auto& row : t.rows) {
    const auto& v = row[lab];
    if (v == "1" || v == "true" || v == "adult")
      out[row[id]] = true;
    else if (v == "0" || v == "false" || v == "not_adult")
      out[row[id]] = false;
    else
      fail(Errc::malformed_record, fmt::format("{}: label '{}' for {} is not binary", path.string(), v, row[id]));
  }
  return out;
}

std::map<std::string, std::string> read_statuses(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = t.column("tweet_id"), st = t.column("status");
  std::map<std::string, std::string> out;
  for (const auto& row : t.rows) out[row[id]] = row[st];
  return out;
}

std::string yes_no(bool b) { return b ? "1" : "0"; }

}  // namespace detail

}  // namespace adaudit::pipeline
