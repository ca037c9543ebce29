#include "adaudit/annotate/session.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/common/hash.hpp"

namespace adaudit::annotate {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::adult_binary: return "adult_binary";
    case TaskKind::cluster_blind: return "cluster_blind";
    case TaskKind::fp_review: return "fp_review";
    case TaskKind::landing_category: return "landing_category";
  }
  return "adult_binary";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  for (auto k : {TaskKind::adult_binary, TaskKind::cluster_blind, TaskKind::fp_review, TaskKind::landing_category})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::vector<std::string> landing_taxonomy() {
  return {"porn_site",      "fake_captcha_or_consent", "infected_warning", "antivirus_download",
          "online_game",    "sex_baity",               "channel_promotion", "trading",
          "betting",        "benign",                  "unreachable",       "other"};
}

std::vector<std::string> default_choice_set(TaskKind kind) {
  switch (kind) {
    case TaskKind::adult_binary: return {"adult", "not_adult"};
    case TaskKind::fp_review: return {"true_positive", "false_positive"};
    case TaskKind::landing_category: return landing_taxonomy();
    case TaskKind::cluster_blind: return {};
  }
  return {};
}

struct SessionStore::Session {
  std::string id;
  fs::path dir;
  TaskKind kind = TaskKind::adult_binary;
  std::vector<AnnotationTask> tasks;
  std::map<std::string, std::size_t> task_index;
  std::vector<std::string> annotators;
  std::map<std::string, std::vector<std::size_t>> order;
  std::map<std::string, std::string> hidden;
  std::vector<LabelEvent> events;
  std::map<std::pair<std::string, std::string>, std::size_t> labeled;  // (annotator, task) -> event index

  bool assigned(const std::string& annotator) const {
    return std::find(annotators.begin(), annotators.end(), annotator) != annotators.end();
  }
  void apply(LabelEvent e) {
    labeled.emplace(std::pair{e.annotator, e.task_id}, events.size());
    events.push_back(std::move(e));
  }
  std::size_t done_by(const std::string& annotator) const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
                                                  [&](const LabelEvent& e) { return e.annotator == annotator; }));
  }
};

namespace {

json event_json(const LabelEvent& e) {
  return json{{"annotator", e.annotator}, {"task_id", e.task_id}, {"label", e.label},
              {"labeled_at", format_timestamp(e.labeled_at)}};
}

void write_json_file(const fs::path& path, const json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read " + path.string());
  return json::parse(in);
}

}  // namespace

SessionStore::SessionStore(fs::path root, Clock clock)
    : root_(std::move(root)),
      clock_(clock ? std::move(clock) : Clock([] {
        return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
      })) {
  fs::create_directories(root_ / "sessions");
}

SessionStore::~SessionStore() = default;

std::string SessionStore::create_session(const SessionSpec& spec) {
  require(!spec.annotators.empty(), "session needs at least one annotator");
  require(!spec.items.empty(), "session needs at least one item");
  require(std::set<std::string>(spec.annotators.begin(), spec.annotators.end()).size() == spec.annotators.size(),
          "annotator ids must be distinct");
  auto choices = spec.choice_set.empty() ? default_choice_set(spec.kind) : spec.choice_set;
  require(!choices.empty(), fmt::format("{} session needs an explicit choice set", to_string(spec.kind)));

  json identity{{"kind", to_string(spec.kind)}, {"annotators", spec.annotators}, {"seed", spec.seed},
                {"choices", choices}};
  for (const auto& item : spec.items) identity["items"].push_back(item.tweet_id);
  const std::string id = sha256_hex(identity.dump()).substr(0, 16);

  std::lock_guard lock(mu_);
  const fs::path dir = root_ / "sessions" / id;
  if (fs::exists(dir / "session.json")) fail(Errc::duplicate_session, "session " + id + " already exists");
  fs::create_directories(dir);

  json tasks = json::array();
  json hidden = json::object();
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    const std::string task_id = fmt::format("t{:05d}", i);
    tasks.push_back({{"task_id", task_id}, {"tweet_id", spec.items[i].tweet_id},
                     {"presented_text", spec.items[i].presented_text}});
    if (spec.items[i].hidden_label) hidden[task_id] = *spec.items[i].hidden_label;
  }
  json orders = json::object();
  for (const auto& a : spec.annotators) {
    std::vector<std::size_t> order(spec.items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(stable_seed(fmt::format("{}:{}", spec.seed, a)));
    std::shuffle(order.begin(), order.end(), rng);
    orders[a] = order;
  }
  write_json_file(dir / "hidden.json", hidden);
  write_json_file(dir / "session.json", json{{"session_id", id},
                                             {"kind", to_string(spec.kind)},
                                             {"choice_set", choices},
                                             {"annotators", spec.annotators},
                                             {"seed", spec.seed},
                                             {"tasks", tasks},
                                             {"order", orders}});
  std::ofstream(dir / "events.jsonl", std::ios::app);
  cache_.erase(id);
  return id;
}

bool SessionStore::exists(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return cache_.contains(session_id) ||
         (session_id.find_first_of("/\\.") == std::string::npos && fs::exists(root_ / "sessions" / session_id / "session.json"));
}

std::vector<std::string> SessionStore::list_sessions() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions"))
    if (fs::exists(entry.path() / "session.json")) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

SessionStore::Session& SessionStore::load(const std::string& session_id) const {
  if (auto it = cache_.find(session_id); it != cache_.end()) return *it->second;
  if (session_id.empty() || session_id.find_first_of("/\\.") != std::string::npos)
    fail(Errc::unknown_session, "no session " + session_id);
  const fs::path dir = root_ / "sessions" / session_id;
  if (!fs::exists(dir / "session.json")) fail(Errc::unknown_session, "no session " + session_id);

  auto s = std::make_unique<Session>();
  const json meta = read_json_file(dir / "session.json");
  s->id = session_id;
  s->dir = dir;
  s->kind = parse_task_kind(meta.at("kind").get<std::string>()).value();
  const auto choices = meta.at("choice_set").get<std::vector<std::string>>();
  for (const auto& t : meta.at("tasks")) {
    s->task_index[t.at("task_id").get<std::string>()] = s->tasks.size();
    s->tasks.push_back({t.at("task_id"), s->kind, t.at("tweet_id"), t.at("presented_text"), choices});
  }
  s->annotators = meta.at("annotators").get<std::vector<std::string>>();
  for (const auto& a : s->annotators) s->order[a] = meta.at("order").at(a).get<std::vector<std::size_t>>();
  s->hidden = read_json_file(dir / "hidden.json").get<std::map<std::string, std::string>>();

  std::ifstream events(dir / "events.jsonl");
  std::string line;
  while (std::getline(events, line)) {
    if (line.empty()) continue;
    const json e = json::parse(line);
    const auto at = parse_timestamp(e.at("labeled_at").get<std::string>());
    if (!at) fail(Errc::malformed_record, "bad timestamp in " + (dir / "events.jsonl").string());
    s->apply({e.at("annotator"), e.at("task_id"), e.at("label"), *at});
  }
  return *cache_.emplace(session_id, std::move(s)).first->second;
}

std::vector<AnnotationTask> SessionStore::tasks(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return load(session_id).tasks;
}

std::vector<std::string> SessionStore::order_for(const std::string& session_id, const std::string& annotator) const {
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  require(s.assigned(annotator), "annotator " + annotator + " is not part of session " + session_id);
  std::vector<std::string> ids;
  for (std::size_t i : s.order.at(annotator)) ids.push_back(s.tasks[i].task_id);
  return ids;
}

std::optional<AnnotationTask> SessionStore::next_task(const std::string& session_id, const std::string& annotator) const {
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  require(s.assigned(annotator), "annotator " + annotator + " is not part of session " + session_id);
  for (std::size_t i : s.order.at(annotator))
    if (!s.labeled.contains({annotator, s.tasks[i].task_id})) return s.tasks[i];
  return std::nullopt;
}

AnnotatorProgress SessionStore::progress(const std::string& session_id, const std::string& annotator) const {
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  require(s.assigned(annotator), "annotator " + annotator + " is not part of session " + session_id);
  return {annotator, s.done_by(annotator), s.tasks.size()};
}

SessionStatus SessionStore::status(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  SessionStatus st;
  st.session_id = s.id;
  st.kind = s.kind;
  st.n_items = s.tasks.size();
  for (const auto& a : s.annotators) {
    st.annotators.push_back({a, s.done_by(a), s.tasks.size()});
    st.pending += s.tasks.size() - st.annotators.back().done;
  }
  return st;
}

LabelEvent SessionStore::submit_label(const std::string& session_id, const std::string& annotator,
                                      const std::string& task_id, const std::string& label) {
  std::lock_guard lock(mu_);
  auto& s = load(session_id);
  const auto t = s.task_index.find(task_id);
  if (t == s.task_index.end() || !s.assigned(annotator))
    fail(Errc::unknown_task, fmt::format("task {} is not assigned to {}", task_id, annotator));
  if (s.labeled.contains({annotator, task_id}))
    fail(Errc::already_labeled, fmt::format("{} already labeled {}", annotator, task_id));
  const auto& choices = s.tasks[t->second].choice_set;
  if (std::find(choices.begin(), choices.end(), label) == choices.end())
    fail(Errc::label_not_in_choice_set, fmt::format("'{}' is not a choice for {}", label, task_id));

  LabelEvent e{annotator, task_id, label, clock_()};
  {
    std::ofstream out(s.dir / "events.jsonl", std::ios::app | std::ios::binary);
    out << event_json(e).dump() << '\n';
    out.flush();
    if (!out) fail(Errc::io, "cannot append to " + (s.dir / "events.jsonl").string());
  }
  s.apply(e);
  return e;
}

std::vector<LabelEvent> SessionStore::events(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return load(session_id).events;
}

namespace {

void require_complete(const std::vector<AnnotatorProgress>& progress, const std::string& session_id) {
  for (const auto& p : progress)
    if (p.done < p.total)
      fail(Errc::incomplete, fmt::format("session {}: {} labeled {} of {}", session_id, p.annotator, p.done, p.total));
}

}  // namespace

AgreementReport SessionStore::agreement(const std::string& session_id) const {
  const auto st = status(session_id);
  require_complete(st.annotators, session_id);
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  std::vector<std::vector<std::string>> labels;
  for (const auto& t : s.tasks) {
    auto& row = labels.emplace_back();
    for (const auto& a : s.annotators) row.push_back(s.events[s.labeled.at({a, t.task_id})].label);
  }
  return agreement_report(labels);
}

std::pair<std::size_t, std::size_t> SessionStore::blind_accuracy(const std::string& session_id,
                                                                 const std::map<std::string, std::string>& hidden) const {
  const auto st = status(session_id);
  require(st.kind == TaskKind::cluster_blind, "blind accuracy applies to cluster_blind sessions");
  require_complete(st.annotators, session_id);
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  std::size_t correct = 0;
  for (const auto& e : s.events) {
    const auto h = hidden.find(e.task_id);
    if (h != hidden.end() && h->second == e.label) ++correct;
  }
  return {correct, s.events.size()};
}

std::pair<std::size_t, std::size_t> SessionStore::blind_accuracy(const std::string& session_id) const {
  std::map<std::string, std::string> hidden;
  {
    std::lock_guard lock(mu_);
    hidden = load(session_id).hidden;
  }
  return blind_accuracy(session_id, hidden);
}

void SessionStore::export_csv(const std::string& session_id, std::ostream& out) const {
  std::lock_guard lock(mu_);
  const auto& s = load(session_id);
  out << "task_id,tweet_id,annotator,label,labeled_at\n";
  for (const auto& t : s.tasks) {
    for (const auto& a : s.annotators) {
      const auto it = s.labeled.find({a, t.task_id});
      if (it == s.labeled.end()) continue;
      const auto& e = s.events[it->second];
      out << csv_escape(t.task_id) << ',' << csv_escape(t.tweet_id) << ',' << csv_escape(a) << ','
          << csv_escape(e.label) << ',' << format_timestamp(e.labeled_at) << "\n";
    }
  }
}

}  // namespace adaudit::annotate
