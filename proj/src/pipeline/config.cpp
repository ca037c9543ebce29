#include "adaudit/pipeline/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>

#include <fmt/format.h>

#include "adaudit/common/error.hpp"

namespace adaudit::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(Errc::config_invalid, what); }

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) invalid(fmt::format("{} must be an object", where));
  for (const auto& [k, _] : obj.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) invalid(fmt::format("unknown key {}.{}", where, k));
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

void read_duration(const json& obj, const char* key, std::chrono::milliseconds& out, std::string_view where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  const auto d = v.is_string() ? parse_duration(v.get<std::string>()) : std::nullopt;
  if (!d) invalid(fmt::format("{}.{}: expected a duration such as \"14d\"", where, key));
  out = *d;
}

fs::path resolve(const fs::path& dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (dir / path).lexically_normal();
}

void read_service(const json& obj, const char* key, ServiceConfig& out, std::initializer_list<std::string_view> extra,
                  const std::function<void(const json&)>& on_extra = {}) {
  if (!obj.contains(key)) return;
  const auto& s = obj.at(key);
  std::vector<std::string_view> keys{"base_url", "api_key_env", "timeout"};
  keys.insert(keys.end(), extra.begin(), extra.end());
  if (!s.is_object()) invalid(fmt::format("services.{} must be an object", key));
  for (const auto& [k, _] : s.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) invalid(fmt::format("unknown key services.{}.{}", key, k));
  const std::string where = fmt::format("services.{}", key);
  read(s, "base_url", out.base_url, where);
  read(s, "api_key_env", out.api_key_env, where);
  read_duration(s, "timeout", out.timeout, where);
  if (on_extra) on_extra(s);
}

}  // namespace

AuditConfig parse_config(const json& j, const fs::path& config_dir) {
  AuditConfig c;
  c.config_dir = config_dir;
  c.raw = j;
  allow_keys(j, "config", {"inputs", "corpus", "moderation", "explicit", "cluster", "urls", "annotation", "services"});

  const json inputs = j.value("inputs", json::object());
  allow_keys(inputs, "inputs", {"stream", "rehydrated", "calibration_labels", "false_positives", "lexicon"});
  if (!inputs.contains("stream") || !inputs.contains("rehydrated")) invalid("inputs.stream and inputs.rehydrated are required");
  c.stream = resolve(config_dir, inputs.at("stream").get<std::string>());
  c.rehydrated = resolve(config_dir, inputs.at("rehydrated").get<std::string>());
  for (auto [key, slot] : {std::pair{"calibration_labels", &c.calibration_labels},
                           std::pair{"false_positives", &c.false_positives}, std::pair{"lexicon", &c.lexicon}})
    if (inputs.contains(key)) *slot = resolve(config_dir, inputs.at(key).get<std::string>());

  const json corpus_cfg = j.value("corpus", json::object());
  allow_keys(corpus_cfg, "corpus", {"ad_sources", "no_translate"});
  if (corpus_cfg.contains("ad_sources"))
    c.ad_sources = corpus::AdSourceSet(corpus_cfg.at("ad_sources").get<std::set<std::string>>());
  read(corpus_cfg, "no_translate", c.no_translate, "corpus");

  const json mod = j.value("moderation", json::object());
  allow_keys(mod, "moderation", {"rehydration_window", "strict_window", "collection_start", "late_removed_ads"});
  read_duration(mod, "rehydration_window", c.rehydration_window, "moderation");
  read(mod, "strict_window", c.strict_window, "moderation");
  read(mod, "late_removed_ads", c.late_removed_ads, "moderation");
  if (!mod.contains("collection_start")) invalid("moderation.collection_start is required");
  const auto start = parse_timestamp(mod.at("collection_start").get<std::string>());
  if (!start) invalid("moderation.collection_start is not a UTC timestamp");
  c.collection_start = *start;

  const json ex = j.value("explicit", json::object());
  allow_keys(ex, "explicit", {"threshold", "apply_calibrated_threshold", "per_bin", "bin_width", "seed", "attribute"});
  read(ex, "threshold", c.explicit_threshold, "explicit");
  read(ex, "apply_calibrated_threshold", c.apply_calibrated_threshold, "explicit");
  read(ex, "per_bin", c.calibration_per_bin, "explicit");
  read(ex, "bin_width", c.calibration_bin_width, "explicit");
  read(ex, "seed", c.calibration_seed, "explicit");
  read(ex, "attribute", c.explicit_attribute, "explicit");
  if (!(c.explicit_threshold > 0.0 && c.explicit_threshold < 1.0)) invalid("explicit.threshold must lie in (0,1)");
  if (c.calibration_per_bin < 1) invalid("explicit.per_bin must be >= 1");

  const json cl = j.value("cluster", json::object());
  allow_keys(cl, "cluster", {"dbcv_floor", "grid", "reduce_dim", "reduction_seed", "similarity_floor", "community_seed",
                             "blind_sample_size", "blind_seed", "workers"});
  read(cl, "dbcv_floor", c.dbcv_floor, "cluster");
  read(cl, "reduce_dim", c.reduce_dim, "cluster");
  read(cl, "reduction_seed", c.reduction_seed, "cluster");
  read(cl, "similarity_floor", c.similarity_floor, "cluster");
  read(cl, "community_seed", c.community_seed, "cluster");
  read(cl, "blind_sample_size", c.blind_sample_size, "cluster");
  read(cl, "blind_seed", c.blind_seed, "cluster");
  read(cl, "workers", c.cluster_workers, "cluster");
  if (c.dbcv_floor < -1.0 || c.dbcv_floor > 1.0) invalid("cluster.dbcv_floor must lie in [-1,1]");
  if (c.reduce_dim < 1) invalid("cluster.reduce_dim must be >= 1");
  if (cl.contains("grid")) {
    const auto& g = cl.at("grid");
    allow_keys(g, "cluster.grid", {"min_cluster_size", "min_samples", "metrics", "methods"});
    auto& b = c.cluster_grid;
    const auto range = [&](const char* key, int& lo, int& hi) {
      if (!g.contains(key)) return;
      const auto v = g.at(key).get<std::vector<int>>();
      if (v.size() != 2 || v[0] > v[1]) invalid(fmt::format("cluster.grid.{} must be [lo, hi]", key));
      lo = v[0];
      hi = v[1];
    };
    range("min_cluster_size", b.min_cluster_size_lo, b.min_cluster_size_hi);
    range("min_samples", b.min_samples_lo, b.min_samples_hi);
    if (b.min_cluster_size_lo < 2 || b.min_samples_lo < 1) invalid("cluster.grid bounds below minimum");
    if (g.contains("metrics")) {
      b.metrics.clear();
      for (const auto& m : g.at("metrics").get<std::vector<std::string>>()) {
        const auto metric = clusterlab::parse_metric(m);
        if (!metric) invalid("unknown metric " + m);
        b.metrics.push_back(*metric);
      }
    }
    if (g.contains("methods")) {
      b.methods.clear();
      for (const auto& m : g.at("methods").get<std::vector<std::string>>()) {
        const auto method = clusterlab::parse_selection_method(m);
        if (!method) invalid("unknown selection method " + m);
        b.methods.push_back(*method);
      }
    }
  }

  const json urls = j.value("urls", json::object());
  allow_keys(urls, "urls", {"threshold", "max_hops", "timeout", "workers", "politeness_delay"});
  read(urls, "threshold", c.url_threshold, "urls");
  read(urls, "max_hops", c.max_hops, "urls");
  read_duration(urls, "timeout", c.url_timeout, "urls");
  read(urls, "workers", c.url_workers, "urls");
  read_duration(urls, "politeness_delay", c.politeness_delay, "urls");
  if (c.url_threshold < 1) invalid("urls.threshold must be >= 1");
  if (c.max_hops < 0) invalid("urls.max_hops must be >= 0");

  const json ann = j.value("annotation", json::object());
  allow_keys(ann, "annotation", {"annotators", "seed", "adult_sample"});
  read(ann, "annotators", c.annotators, "annotation");
  read(ann, "seed", c.annotation_seed, "annotation");
  read(ann, "adult_sample", c.adult_sample, "annotation");
  if (c.annotators.empty()) invalid("annotation.annotators must not be empty");

  const json svc = j.value("services", json::object());
  allow_keys(svc, "services", {"mode", "cassette_dir", "explicit", "translate", "embedding", "reputation"});
  if (svc.contains("mode")) {
    const auto mode = parse_service_mode(svc.at("mode").get<std::string>());
    if (!mode) invalid("services.mode must be live, record or replay");
    c.service_mode = *mode;
  }
  if (svc.contains("cassette_dir")) c.cassette_dir = resolve(config_dir, svc.at("cassette_dir").get<std::string>());
  read_service(svc, "explicit", c.explicit_service, {});
  read_service(svc, "translate", c.translate_service, {});
  read_service(svc, "embedding", c.embedding_service, {"model"},
               [&](const json& s) { read(s, "model", c.embedding_model, "services.embedding"); });
  read_service(svc, "reputation", c.reputation_service, {});
  if (c.service_mode != ServiceMode::live && !c.cassette_dir)
    invalid("services.cassette_dir is required unless services.mode is live");
  return c;
}

AuditConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_invalid, "cannot read config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(Errc::config_invalid, "config is not valid JSON: " + path.string());
  return parse_config(j, fs::absolute(path).parent_path());
}

void force_replay(AuditConfig& config, const fs::path& dir) {
  config.service_mode = ServiceMode::replay;
  config.cassette_dir = fs::absolute(dir);
}

HttpEndpoint endpoint_for(const ServiceConfig& service) {
  HttpEndpoint e;
  e.base_url = service.base_url;
  e.timeout = service.timeout;
  if (!service.api_key_env.empty())
    if (const char* key = std::getenv(service.api_key_env.c_str())) e.api_key = key;
  return e;
}

JsonService make_service(const AuditConfig& config, const ServiceConfig& service, const std::string& cassette_subdir) {
  std::optional<Cassette> cassette;
  if (config.cassette_dir) cassette.emplace(*config.cassette_dir / cassette_subdir);
  std::optional<HttpEndpoint> endpoint;
  if (config.service_mode != ServiceMode::replay) endpoint = endpoint_for(service);
  return JsonService(config.service_mode, std::move(cassette), std::move(endpoint));
}

}  // namespace adaudit::pipeline
