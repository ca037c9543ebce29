#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "adaudit/annotate/agreement.hpp"
#include "adaudit/annotate/api.hpp"
#include "adaudit/annotate/session.hpp"
#include "oracles.hpp"
#include "support.hpp"
// httplib drags in resolv.h, whose macros collide with Eigen; keep it last.
#include "local_server.hpp"

using namespace adaudit;
using namespace adaudit::annotate;
using nlohmann::json;
using testing::error_code;

namespace {

Clock fixed_clock() {
  auto t = std::make_shared<Timestamp>(testing::ts("2023-01-10T09:00:00Z"));
  return [t] {
    *t += std::chrono::seconds{1};
    return *t;
  };
}

SessionSpec blind_spec(std::size_t n) {
  SessionSpec spec;
  spec.kind = TaskKind::cluster_blind;
  spec.annotators = {"ann1", "ann2"};
  spec.seed = 5;
  spec.choice_set = {"cluster_0", "cluster_1", "cluster_2"};
  for (std::size_t i = 0; i < n; ++i)
    spec.items.push_back({fmt::format("tw{}", i), fmt::format("ad text {}", i), fmt::format("cluster_{}", i % 3)});
  return spec;
}

SessionSpec binary_spec(std::size_t n, std::vector<std::string> annotators = {"a", "b", "c"}) {
  SessionSpec spec;
  spec.kind = TaskKind::adult_binary;
  spec.annotators = std::move(annotators);
  spec.seed = 1;
  for (std::size_t i = 0; i < n; ++i) spec.items.push_back({fmt::format("id{}", i), fmt::format("text {}", i), {}});
  return spec;
}

ApiRequest get(std::string path, std::map<std::string, std::string> query = {}) {
  return {"GET", std::move(path), std::move(query), ""};
}

ApiRequest post_label(const std::string& session, const std::string& annotator, const std::string& task,
                      const std::string& label) {
  return {"POST", "/labels", {}, json{{"session_id", session}, {"annotator", annotator}, {"task_id", task}, {"label", label}}.dump()};
}

}  // namespace

TEST_CASE("fleiss kappa agrees with the defining sums") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const int items = 2 + static_cast<int>(rng() % 20);
    const int cats = 2 + static_cast<int>(rng() % 4);
    const int raters = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(items), std::vector<int>(static_cast<std::size_t>(cats), 0));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(items, cats);
    for (int i = 0; i < items; ++i)
      for (int r = 0; r < raters; ++r) {
        // Skewed toward category 0 so kappa spans a useful range.
        const int c = rng() % 3 == 0 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(cats));
        ++rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        m(i, c) += 1.0;
      }
    if ((m.colwise().sum().array() > 0).count() == 1) {
      CHECK(error_code([&] { fleiss_kappa(m); }) == Errc::kappa_undefined);
      continue;
    }
    const double k = fleiss_kappa(m);
    CHECK(k == Catch::Approx(oracle::fleiss_kappa(rows)).margin(1e-12));
    CHECK(k <= 1.0 + 1e-12);
  }
}

TEST_CASE("fleiss kappa extremes") {
  Eigen::MatrixXd perfect(4, 2);
  perfect << 3, 0, 0, 3, 3, 0, 0, 3;
  CHECK(fleiss_kappa(perfect) == Catch::Approx(1.0));

  Eigen::MatrixXd anti(2, 2);
  anti << 1, 1, 1, 1;
  CHECK(fleiss_kappa(anti) == Catch::Approx(-1.0));

  Eigen::MatrixXd one_category(3, 2);
  one_category << 2, 0, 2, 0, 2, 0;
  CHECK(error_code([&] { fleiss_kappa(one_category); }) == Errc::kappa_undefined);

  Eigen::MatrixXd ragged(2, 2);
  ragged << 2, 0, 1, 2;
  CHECK(error_code([&] { fleiss_kappa(ragged); }) == Errc::inconsistent_counts);
}

TEST_CASE("agreement report on unanimous and split labels") {
  const auto unanimous = agreement_report({{"adult", "adult"}, {"not_adult", "not_adult"}, {"adult", "adult"}});
  CHECK(unanimous.percent_agreement == 1.0);
  CHECK(unanimous.fleiss_kappa == Catch::Approx(1.0));
  CHECK(unanimous.pairwise_agreement == 1.0);
  CHECK(unanimous.n_items == 3);
  CHECK(unanimous.n_annotators == 2);
  CHECK(unanimous.per_category_marginals.at("adult") == Catch::Approx(2.0 / 3.0));

  const auto mixed = agreement_report({{"x", "x", "y"}, {"x", "x", "x"}, {"y", "y", "y"}, {"x", "y", "y"}});
  CHECK(mixed.percent_agreement == Catch::Approx(0.5));
  CHECK(mixed.pairwise_agreement == Catch::Approx((1.0 / 3 + 1 + 1 + 1.0 / 3) / 4));
  CHECK(mixed.fleiss_kappa == Catch::Approx(oracle::fleiss_kappa({{2, 1}, {3, 0}, {0, 3}, {1, 2}})).margin(1e-12));

  CHECK(error_code([] { agreement_report({{"x", "x"}, {"y"}}); }) == Errc::inconsistent_counts);
  CHECK(error_code([] { agreement_report({}); }) == Errc::incomplete);
}

TEST_CASE("sessions are durable and validate every label") {
  testing::TempDir dir;
  std::string id;
  {
    SessionStore store(dir.path(), fixed_clock());
    id = store.create_session(binary_spec(4));
    CHECK(store.list_sessions() == std::vector<std::string>{id});
    CHECK(error_code([&] { store.create_session(binary_spec(4)); }) == Errc::duplicate_session);
    CHECK(error_code([&] { store.create_session(binary_spec(0)); }) == Errc::precondition);
    CHECK(error_code([&] { store.create_session(binary_spec(2, {})); }) == Errc::precondition);
    CHECK(error_code([&] { store.create_session(blind_spec(0)); }) == Errc::precondition);
    auto no_choices = blind_spec(2);
    no_choices.choice_set.clear();
    CHECK(error_code([&] { store.create_session(no_choices); }) == Errc::precondition);

    const auto tasks = store.tasks(id);
    REQUIRE(tasks.size() == 4);
    CHECK(tasks[0].choice_set == std::vector<std::string>{"adult", "not_adult"});

    const auto first = store.next_task(id, "a");
    REQUIRE(first);
    CHECK(store.order_for(id, "a").front() == first->task_id);
    const auto e = store.submit_label(id, "a", first->task_id, "adult");
    CHECK(e.labeled_at == testing::ts("2023-01-10T09:00:01.000Z"));
    CHECK(error_code([&] { store.submit_label(id, "a", first->task_id, "adult"); }) == Errc::already_labeled);
    CHECK(error_code([&] { store.submit_label(id, "a", "t99999", "adult"); }) == Errc::unknown_task);
    CHECK(error_code([&] { store.submit_label(id, "zed", first->task_id, "adult"); }) == Errc::unknown_task);
    CHECK(error_code([&] { store.submit_label(id, "b", first->task_id, "maybe"); }) == Errc::label_not_in_choice_set);
    CHECK(error_code([&] { store.status("nope"); }) == Errc::unknown_session);
    CHECK(error_code([&] { store.status("../x"); }) == Errc::unknown_session);
    CHECK(error_code([&] { store.agreement(id); }) == Errc::incomplete);
    CHECK(store.progress(id, "a").done == 1);
  }
  SessionStore reopened(dir.path(), fixed_clock());
  CHECK(reopened.exists(id));
  CHECK(reopened.events(id).size() == 1);
  CHECK(reopened.progress(id, "a").done == 1);
  const auto st = reopened.status(id);
  CHECK(st.pending == 11);
  CHECK_FALSE(st.complete());
}

TEST_CASE("annotators see their own order and finish every task") {
  testing::TempDir dir;
  SessionStore store(dir.path(), fixed_clock());
  const auto id = store.create_session(binary_spec(30));
  CHECK(store.order_for(id, "a") != store.order_for(id, "b"));
  for (const auto& a : {"a", "b", "c"}) {
    std::size_t n = 0;
    while (const auto t = store.next_task(id, a)) {
      const auto idx = std::stoi(t->tweet_id.substr(2));
      store.submit_label(id, a, t->task_id, idx % 2 ? "adult" : "not_adult");
      ++n;
    }
    CHECK(n == 30);
  }
  const auto report = store.agreement(id);
  CHECK(report.fleiss_kappa == Catch::Approx(1.0));
  CHECK(report.percent_agreement == 1.0);

  std::ostringstream csv;
  store.export_csv(id, csv);
  std::size_t lines = 0;
  for (char c : csv.str()) lines += c == '\n';
  CHECK(lines == 91);
  CHECK(csv.str().rfind("task_id,tweet_id,annotator,label,labeled_at\n", 0) == 0);
}

TEST_CASE("concurrent labelling keeps one event per label") {
  testing::TempDir dir;
  SessionStore store(dir.path());
  const auto id = store.create_session(binary_spec(50, {"a", "b", "c", "d"}));
  std::vector<std::thread> workers;
  for (const auto& a : {"a", "b", "c", "d"})
    workers.emplace_back([&, a = std::string(a)] {
      while (const auto t = store.next_task(id, a)) store.submit_label(id, a, t->task_id, "adult");
    });
  for (auto& w : workers) w.join();
  CHECK(store.events(id).size() == 200);
  CHECK(store.status(id).complete());
  SessionStore reopened(dir.path());
  CHECK(reopened.events(id).size() == 200);
}

TEST_CASE("blind accuracy uses the hidden labels") {
  testing::TempDir dir;
  SessionStore store(dir.path(), fixed_clock());
  const auto id = store.create_session(blind_spec(6));
  for (const auto& a : {"ann1", "ann2"})
    while (const auto t = store.next_task(id, a)) {
      const int i = std::stoi(t->tweet_id.substr(2));
      // ann1 always matches the model; ann2 only on the first three items
      const int guess = std::string(a) == "ann1" || i < 3 ? i % 3 : (i + 1) % 3;
      store.submit_label(id, a, t->task_id, fmt::format("cluster_{}", guess));
    }
  CHECK(store.blind_accuracy(id) == std::pair<std::size_t, std::size_t>{9, 12});
  CHECK(store.blind_accuracy(id, {}) == std::pair<std::size_t, std::size_t>{0, 12});
  const auto other = store.create_session(binary_spec(2));
  CHECK(error_code([&] { store.blind_accuracy(other); }) == Errc::precondition);
}

TEST_CASE("api dispatch status codes") {
  testing::TempDir dir;
  SessionStore store(dir.path(), fixed_clock());
  const auto id = store.create_session(binary_spec(2, {"a", "b"}));
  AnnotationApi api(store);

  const auto status = api.dispatch(get("/sessions/" + id));
  CHECK(status.status == 200);
  CHECK(json::parse(status.body).at("pending") == 4);

  auto next = api.dispatch(get("/sessions/" + id + "/next", {{"annotator", "a"}}));
  CHECK(next.status == 200);
  const auto task = json::parse(next.body).at("task");
  const std::string task_id = task.at("task_id");

  CHECK(api.dispatch(get("/sessions/" + id + "/next")).status == 400);
  CHECK(api.dispatch(get("/sessions/" + id + "/next", {{"annotator", "ghost"}})).status == 400);
  CHECK(api.dispatch(get("/sessions/ffffffffffffffff")).status == 404);
  CHECK(api.dispatch(get("/nowhere")).status == 404);

  const auto ack = api.dispatch(post_label(id, "a", task_id, "adult"));
  CHECK(ack.status == 201);
  CHECK(json::parse(ack.body).at("ack").at("labeled_at") == "2023-01-10T09:00:01.000Z");
  const auto again = api.dispatch(post_label(id, "a", task_id, "adult"));
  CHECK(again.status == 409);
  CHECK(json::parse(again.body).at("error") == "AlreadyLabeled");
  CHECK(api.dispatch(post_label(id, "a", "t00077", "adult")).status == 404);
  CHECK(api.dispatch(post_label(id, "b", task_id, "spicy")).status == 422);
  CHECK(api.dispatch(post_label("ffffffffffffffff", "b", task_id, "adult")).status == 404);
  CHECK(api.dispatch({"POST", "/labels", {}, "not json"}).status == 400);
  CHECK(api.dispatch({"POST", "/labels", {}, R"({"session_id":"x"})"}).status == 400);

  const auto early = api.dispatch(get("/sessions/" + id + "/agreement"));
  CHECK(early.status == 409);
  CHECK(json::parse(early.body).at("error") == "Incomplete");

  for (const auto& a : {"a", "b"})
    while (const auto t = store.next_task(id, a)) store.submit_label(id, a, t->task_id, "adult");
  const auto undefined = api.dispatch(get("/sessions/" + id + "/agreement"));
  CHECK(undefined.status == 422);
  CHECK(json::parse(undefined.body).at("error") == "KappaUndefined");

  const auto done = api.dispatch(get("/sessions/" + id + "/next", {{"annotator", "a"}}));
  CHECK(json::parse(done.body).at("task").is_null());
  CHECK(json::parse(done.body).at("progress").at("done") == 2);

  const auto csv = api.dispatch(get("/sessions/" + id + "/export.csv"));
  CHECK(csv.status == 200);
  CHECK(csv.content_type == "text/csv");
}

TEST_CASE("hidden labels never reach an annotator") {
  testing::TempDir dir;
  SessionStore store(dir.path(), fixed_clock());
  auto spec = blind_spec(9);
  for (auto& item : spec.items) *item.hidden_label = "SECRET-" + *item.hidden_label;
  spec.choice_set = {"SECRET-cluster_0", "SECRET-cluster_1", "SECRET-cluster_2", "other"};
  const auto id = store.create_session(spec);
  AnnotationApi api(store);

  std::vector<std::string> payloads;
  const auto collect = [&](const ApiResponse& r) { payloads.push_back(r.body); };
  collect(api.dispatch(get("/sessions/" + id)));
  for (const auto& a : {"ann1", "ann2"}) {
    while (true) {
      const auto r = api.dispatch(get("/sessions/" + id + "/next", {{"annotator", a}}));
      collect(r);
      const auto body = json::parse(r.body);
      if (body.at("task").is_null()) break;
      const auto& task = body.at("task");
      // The task schema is fixed; no field may carry a model label.
      std::set<std::string> keys;
      for (const auto& [k, v] : task.items()) keys.insert(k);
      CHECK(keys == std::set<std::string>{"task_id", "kind", "tweet_id", "presented_text", "choice_set"});
      collect(api.dispatch(post_label(id, a, task.at("task_id"), "other")));
    }
  }
  collect(api.dispatch(get("/sessions/" + id + "/agreement")));
  for (const auto& p : payloads) {
    // Choice strings legitimately contain the prefix; strip them before looking.
    auto body = json::parse(p);
    std::string flat = body.dump();
    for (const auto& c : spec.choice_set) {
      for (std::size_t pos; (pos = flat.find('"' + c + '"')) != std::string::npos;) flat.erase(pos, c.size() + 2);
    }
    CHECK(flat.find("SECRET") == std::string::npos);
  }
}

TEST_CASE("api served over HTTP") {
  testing::TempDir dir;
  SessionStore store(dir.path(), fixed_clock());
  const auto id = store.create_session(binary_spec(1, {"a", "b"}));
  AnnotationApi api(store);
  testing::TempDir ui;
  { std::ofstream(ui / "index.html") << "<h1>ui</h1>"; }

  testing::LocalServer srv;
  api.mount(srv.server(), ui.path());
  srv.start();
  httplib::Client client(srv.base());

  const auto next = client.Get("/sessions/" + id + "/next?annotator=a");
  REQUIRE(next);
  CHECK(next->status == 200);
  const std::string task_id = json::parse(next->body).at("task").at("task_id");

  const auto body = json{{"session_id", id}, {"annotator", "a"}, {"task_id", task_id}, {"label", "adult"}}.dump();
  const auto posted = client.Post("/labels", body, "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 201);
  const auto dup = client.Post("/labels", body, "application/json");
  REQUIRE(dup);
  CHECK(dup->status == 409);

  const auto page = client.Get("/ui/index.html");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body == "<h1>ui</h1>");
  srv.stop();
  CHECK(store.events(id).size() == 1);
}
