#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "adaudit/annotate/agreement.hpp"
#include "adaudit/common/time.hpp"

namespace adaudit::annotate {

enum class TaskKind { adult_binary, cluster_blind, fp_review, landing_category };

std::string_view to_string(TaskKind kind) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view text);

/// Choice set used when a session does not supply one. cluster_blind has no
/// default; its choices are the cluster labels of the sampled run.
std::vector<std::string> default_choice_set(TaskKind kind);

/// Landing-page categories annotators pick from.
std::vector<std::string> landing_taxonomy();

/// What an annotator is shown. There is deliberately no field for the model's label.
struct AnnotationTask {
  std::string task_id;
  TaskKind kind = TaskKind::adult_binary;
  std::string tweet_id;
  std::string presented_text;
  std::vector<std::string> choice_set;
};

struct SessionItem {
  std::string tweet_id;
  std::string presented_text;
  std::optional<std::string> hidden_label;  // cluster_blind only; kept out of every task payload
};

struct SessionSpec {
  TaskKind kind = TaskKind::adult_binary;
  std::vector<SessionItem> items;
  std::vector<std::string> annotators;
  std::uint64_t seed = 0;
  std::vector<std::string> choice_set;  // empty = default for the kind
};

struct LabelEvent {
  std::string annotator;
  std::string task_id;
  std::string label;
  Timestamp labeled_at{};
};

struct AnnotatorProgress {
  std::string annotator;
  std::size_t done = 0;
  std::size_t total = 0;
};

struct SessionStatus {
  std::string session_id;
  TaskKind kind = TaskKind::adult_binary;
  std::size_t n_items = 0;
  std::vector<AnnotatorProgress> annotators;
  std::size_t pending = 0;
  bool complete() const { return pending == 0; }
};

using Clock = std::function<Timestamp()>;

/// Durable annotation sessions.
///
/// Layout under `root`:
///   sessions/<id>/session.json   kind, tasks, annotators, per-annotator order
///   sessions/<id>/hidden.json    task_id -> model label (cluster_blind only)
///   sessions/<id>/events.jsonl   one LabelEvent per line, append-only
///
/// All operations take one store-wide lock, so writes are linearizable.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root, Clock clock = {});
  ~SessionStore();

  /// Throws duplicate_session if the same spec was created before and
  /// precondition on zero annotators or zero items.
  std::string create_session(const SessionSpec& spec);
  bool exists(const std::string& session_id) const;
  std::vector<std::string> list_sessions() const;

  std::vector<AnnotationTask> tasks(const std::string& session_id) const;
  /// Tasks in the annotator's private order.
  std::vector<std::string> order_for(const std::string& session_id, const std::string& annotator) const;

  /// First unlabeled task in the annotator's order; nullopt when done.
  std::optional<AnnotationTask> next_task(const std::string& session_id, const std::string& annotator) const;
  AnnotatorProgress progress(const std::string& session_id, const std::string& annotator) const;
  SessionStatus status(const std::string& session_id) const;

  LabelEvent submit_label(const std::string& session_id, const std::string& annotator, const std::string& task_id,
                          const std::string& label);
  std::vector<LabelEvent> events(const std::string& session_id) const;

  /// Throws incomplete unless every annotator labeled every task.
  AgreementReport agreement(const std::string& session_id) const;

  /// (matching labels, labels) against `hidden` (task_id -> label). Throws incomplete.
  std::pair<std::size_t, std::size_t> blind_accuracy(const std::string& session_id,
                                                     const std::map<std::string, std::string>& hidden) const;
  /// Same, using the labels stored at creation.
  std::pair<std::size_t, std::size_t> blind_accuracy(const std::string& session_id) const;

  /// CSV: task_id,tweet_id,annotator,label,labeled_at
  void export_csv(const std::string& session_id, std::ostream& out) const;

 private:
  struct Session;
  Session& load(const std::string& session_id) const;

  std::filesystem::path root_;
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::unique_ptr<Session>> cache_;
};

}  // namespace adaudit::annotate
