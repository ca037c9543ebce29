// audit: command-line driver for the ad-moderation audit pipeline.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adaudit/annotate/api.hpp"
#include "adaudit/annotate/session.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/pipeline/config.hpp"
#include "adaudit/pipeline/stages.hpp"

// After the Eigen users: resolv.h, pulled in by httplib, defines _res.
#include <httplib.h>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adaudit;

namespace {

struct StageArgs {
  std::string config;
  std::string workdir = "work";
  std::string cassette;
  bool force = false;
  std::optional<double> explicit_threshold;
  std::optional<int> max_hops;
  std::optional<int> url_threshold;
  std::string report_out;
};

pipeline::AuditConfig build_config(const StageArgs& a) {
  std::ifstream in(a.config);
  if (!in) fail(Errc::config_invalid, "cannot read config " + a.config);
  json raw = json::parse(in, nullptr, false);
  if (raw.is_discarded() || !raw.is_object()) fail(Errc::config_invalid, "config is not a JSON object: " + a.config);
  // Overrides are written into the config document so they change the run id.
  if (a.explicit_threshold) raw["explicit"]["threshold"] = *a.explicit_threshold;
  if (a.max_hops) raw["urls"]["max_hops"] = *a.max_hops;
  if (a.url_threshold) raw["urls"]["threshold"] = *a.url_threshold;
  auto config = pipeline::parse_config(raw, fs::absolute(a.config).parent_path());
  if (!a.cassette.empty()) pipeline::force_replay(config, a.cassette);
  return config;
}

void print_receipt(const pipeline::StageReceipt& r) {
  std::size_t rows = 0;
  for (const auto& [file, n] : r.rows) rows += n;
  std::cout << fmt::format("{:<16} {:<8} {} files, {} rows\n", pipeline::to_string(r.stage),
                           r.reused ? "reused" : "ran", r.outputs.size(), rows);
}

void copy_report(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  for (const auto& e : fs::directory_iterator(from))
    if (e.is_regular_file() && e.path().filename() != "receipt.json")
      fs::copy_file(e.path(), to / e.path().filename(), fs::copy_options::overwrite_existing);
}

int run_pipeline(const StageArgs& a, std::optional<pipeline::Stage> stage) {
  pipeline::RunOptions options;
  options.force = a.force;
  options.log_prefix = "audit: ";
  pipeline::Pipeline p(build_config(a), a.workdir, options);
  std::cout << "run " << p.run_id() << " in " << p.run_dir().string() << '\n';
  if (stage) {
    print_receipt(p.run_stage(*stage));
  } else {
    for (const auto& r : p.full_run()) print_receipt(r);
  }
  if (!a.report_out.empty() && (!stage || *stage == pipeline::Stage::report)) {
    copy_report(p.stage_dir(pipeline::Stage::report), a.report_out);
    std::cout << "report copied to " << a.report_out << '\n';
  }
  return 0;
}

void add_stage_options(CLI::App* cmd, StageArgs& a) {
  cmd->add_option("--config", a.config, "Pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--workdir", a.workdir, "Directory holding content-addressed runs")->capture_default_str();
  cmd->add_option("--cassette", a.cassette, "Replay every external service from this cassette directory");
  cmd->add_flag("--force", a.force, "Rerun even when the stage receipt is current");
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit pipeline for ad moderation compliance"};
  app.require_subcommand(1);
  StageArgs args;

  std::optional<pipeline::Stage> chosen;
  for (pipeline::Stage s : pipeline::kAllStages) {
    auto* cmd = app.add_subcommand(std::string(pipeline::to_string(s)), fmt::format("Run the {} stage", pipeline::to_string(s)));
    add_stage_options(cmd, args);
    if (s == pipeline::Stage::score)
      cmd->add_option("--threshold", args.explicit_threshold, "Explicitness threshold (0,1)");
    if (s == pipeline::Stage::urls) {
      cmd->add_option("--max-hops", args.max_hops, "Redirect hop limit");
      cmd->add_option("--threshold", args.url_threshold, "Problematic URL threshold");
    }
    if (s == pipeline::Stage::report) cmd->add_option("--out", args.report_out, "Copy report files here");
    cmd->callback([&chosen, s] { chosen = s; });
  }
  auto* full = app.add_subcommand("full-run", "Run every stage in order, reusing current receipts");
  add_stage_options(full, args);
  full->add_option("--out", args.report_out, "Copy report files here");

  auto* annotate = app.add_subcommand("annotate", "Annotation sessions");
  annotate->require_subcommand(1);
  std::string sessions_root, session_id, host = "127.0.0.1", ui_dir, annotator, task, label;
  int port = 8080;
  auto* serve = annotate->add_subcommand("serve", "Serve the annotation HTTP API");
  serve->add_option("--sessions", sessions_root, "Session store root")->required();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--ui", ui_dir, "Static files served under /ui");
  auto* agreement = annotate->add_subcommand("agreement", "Agreement statistics of a complete session");
  auto* blind = annotate->add_subcommand("blind-accuracy", "Accuracy of blind cluster labels against the hidden ones");
  auto* status = annotate->add_subcommand("status", "Progress of a session");
  auto* submit = annotate->add_subcommand("label", "Submit one label");
  auto* list = annotate->add_subcommand("list", "List sessions");
  list->add_option("--sessions", sessions_root, "Session store root")->required();
  for (auto* cmd : {agreement, blind, status, submit}) {
    cmd->add_option("--sessions", sessions_root, "Session store root")->required();
    cmd->add_option("--session", session_id, "Session id")->required();
  }
  submit->add_option("--annotator", annotator)->required();
  submit->add_option("--task", task)->required();
  submit->add_option("--label", label)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (full->parsed()) return run_pipeline(args, std::nullopt);
    if (chosen) return run_pipeline(args, chosen);

    annotate::SessionStore store(sessions_root);
    if (serve->parsed()) {
      annotate::AnnotationApi api(store);
      httplib::Server server;
      api.mount(server, ui_dir.empty() ? std::nullopt : std::optional<fs::path>(ui_dir));
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cout << fmt::format("serving {} on http://{}:{}\n", sessions_root, host, port) << std::flush;
      if (!server.listen(host, port)) fail(Errc::io, fmt::format("cannot listen on {}:{}", host, port));
      return 0;
    }
    if (list->parsed()) {
      for (const auto& id : store.list_sessions()) std::cout << id << '\n';
      return 0;
    }
    if (status->parsed()) {
      std::cout << annotate::to_json(store.status(session_id)).dump(2) << '\n';
      return 0;
    }
    if (agreement->parsed()) {
      std::cout << annotate::to_json(store.agreement(session_id)).dump(2) << '\n';
      return 0;
    }
    if (blind->parsed()) {
      const auto [correct, total] = store.blind_accuracy(session_id);
      std::cout << json{{"correct", correct}, {"total", total},
                        {"accuracy", total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0}}
                       .dump(2)
                << '\n';
      return 0;
    }
    if (submit->parsed()) {
      const auto e = store.submit_label(session_id, annotator, task, label);
      std::cout << fmt::format("{} {} {}\n", e.annotator, e.task_id, e.label);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "audit: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "audit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
