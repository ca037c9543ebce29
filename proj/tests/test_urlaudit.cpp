#include <catch_amalgamated.hpp>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "adaudit/common/cassette.hpp"
#include "adaudit/common/hash.hpp"
#include "adaudit/common/url.hpp"
#include "adaudit/urlaudit/fetchers.hpp"
#include "adaudit/urlaudit/redirects.hpp"
#include "adaudit/urlaudit/reputation.hpp"
#include "adaudit/urlaudit/scoring.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"
// httplib drags in resolv.h, whose macros collide with Eigen; keep it last.
#include "local_server.hpp"

using namespace adaudit;
using namespace adaudit::urlaudit;
using namespace std::chrono_literals;
using testing::error_code;

namespace {

/// Canned responses keyed by exact URL; unknown URLs are fetch errors.
class MapFetcher final : public IsolatedFetcher {
 public:
  std::map<std::string, FetchResponse> responses;
  std::map<std::string, int> calls;
  std::mutex mu;

  FetchResponse fetch(const std::string& url, std::chrono::milliseconds) override {
    std::lock_guard lock(mu);
    ++calls[url];
    const auto it = responses.find(url);
    if (it != responses.end()) return it->second;
    FetchResponse r;
    r.outcome = FetchOutcome::error;
    r.error = "no route";
    return r;
  }
  void redirect(const std::string& from, const std::string& to, int status = 301) {
    FetchResponse r;
    r.status = status;
    r.location = to;
    responses[from] = r;
  }
  void page(const std::string& url, std::string body = "<html></html>", int status = 200) {
    FetchResponse r;
    r.status = status;
    r.body = std::move(body);
    responses[url] = r;
  }
};

class MapReputation final : public ReputationClient {
 public:
  std::map<std::string, ReputationCounts> table;
  std::atomic<int> calls{0};
  ReputationCounts lookup(const std::string& canonical_url) override {
    ++calls;
    const auto it = table.find(canonical_url);
    return it == table.end() ? ReputationCounts{0, 0, false} : it->second;
  }
};

}  // namespace

TEST_CASE("problematic score over every small count combination") {
  int cases = 0;
  for (int me = 0; me < 6; ++me)
    for (int se = 0; se < 6; ++se)
      for (int ml = 0; ml < 6; ++ml)
        for (int sl = 0; sl < 6; ++sl) {
          ++cases;
          const UrlCounts c{me, se, ml, sl};
          const int expect = oracle::problematic_score(me, se, ml, sl);
          REQUIRE(problematic_score(c) == expect);
          const auto v = score_tweet_urls("t", {c});
          REQUIRE(v.score == expect);
          REQUIRE(v.problematic == (expect >= 3));
          REQUIRE(v.mal_e == me);
          REQUIRE(v.sus_l == sl);
        }
  CHECK(cases == 1296);
}

TEST_CASE("tweet verdict takes the worst URL") {
  const auto v = score_tweet_urls("t", {{1, 0, 0, 0}, {0, 0, 2, 2, true}, {0, 4, 0, 0}});
  CHECK(v.score == 4);
  CHECK(v.problematic);
  CHECK(v.any_unscanned);
  CHECK(v.mal_l == 2);  // first URL reaching the maximum
  CHECK(v.per_url.size() == 3);

  const auto none = score_tweet_urls("u", {});
  CHECK(none.score == 0);
  CHECK_FALSE(none.problematic);
  CHECK(error_code([] { score_tweet_urls("x", {}, 0); }) == Errc::precondition);
}

TEST_CASE("problematic count drops by at most 11 percent from threshold 3 to 7") {
  const auto verdicts = fixtures::sensitivity_verdicts();
  const auto at3 = count_problematic(verdicts, 3);
  const auto at7 = count_problematic(verdicts, 7);
  CHECK(at3 == 451);
  CHECK(at7 == 402);
  CHECK(static_cast<double>(at3 - at7) / static_cast<double>(at3) <= 0.11);
  std::size_t prev = verdicts.size();
  for (int t = 1; t <= 10; ++t) {
    const auto n = count_problematic(verdicts, t);
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("meta refresh targets") {
  CHECK(meta_refresh_target(R"(<meta http-equiv="refresh" content="0; url=https://x.test/a">)") == "https://x.test/a");
  CHECK(meta_refresh_target(R"(<META HTTP-EQUIV=Refresh CONTENT="5;URL='/next?q=1'">)") == "/next?q=1");
  CHECK(meta_refresh_target(R"(<meta content="0;url=/b" http-equiv="refresh"/>)") == "/b");
  CHECK_FALSE(meta_refresh_target(R"(<meta http-equiv="refresh" content="30">)"));
  CHECK_FALSE(meta_refresh_target(R"(<meta name="viewport" content="url=/x">)"));
  CHECK_FALSE(meta_refresh_target("plain text"));
}

TEST_CASE("redirect resolution over a fake fetcher") {
  MapFetcher f;
  f.redirect("http://a.test/1", "/2");
  f.redirect("http://a.test/2", "https://b.test/x?utm=1", 302);
  f.page("https://b.test/x?utm=1", R"(<meta http-equiv="refresh" content="0;url=/land">)");
  f.page("https://b.test/land");

  const auto chain = resolve_redirects("http://a.test/1", f);
  CHECK(chain.terminated_by == Termination::final_200);
  CHECK(chain.landing_url == "https://b.test/land");
  CHECK(chain.final_status == 200);
  REQUIRE(chain.hop_count() == 3);
  CHECK(chain.hops[0] == Hop{"http://a.test/2", 301, HopVia::http_3xx});
  CHECK(chain.hops[1] == Hop{"https://b.test/x?utm=1", 302, HopVia::http_3xx});
  CHECK(chain.hops[2] == Hop{"https://b.test/land", 200, HopVia::meta_refresh});

  const auto direct = resolve_redirects("https://b.test/land", f);
  CHECK(direct.hop_count() == 0);
  CHECK(direct.landing_url == "https://b.test/land");

  f.page("http://a.test/gone", "", 404);
  const auto gone = resolve_redirects("http://a.test/gone", f);
  CHECK(gone.terminated_by == Termination::fetch_error);
  CHECK(gone.final_status == 404);

  FetchResponse bare;
  bare.status = 302;
  f.responses["http://a.test/bare"] = bare;
  CHECK(resolve_redirects("http://a.test/bare", f).terminated_by == Termination::fetch_error);

  const auto unknown = resolve_redirects("http://nowhere.test/", f);
  CHECK(unknown.terminated_by == Termination::fetch_error);
  CHECK_FALSE(unknown.final_status);
}

TEST_CASE("redirect loops stop at the hop limit") {
  MapFetcher f;
  f.redirect("http://l.test/a", "http://l.test/b");
  f.redirect("http://l.test/b", "http://l.test/a");
  for (int max_hops : {1, 3, 10}) {
    const auto chain = resolve_redirects("http://l.test/a", f, max_hops);
    CHECK(chain.terminated_by == Termination::max_hops);
    CHECK(static_cast<int>(chain.hop_count()) == max_hops);
  }
  f.redirect("http://l.test/c", "http://l.test/d");
  f.page("http://l.test/d");
  CHECK(resolve_redirects("http://l.test/c", f, 1).terminated_by == Termination::final_200);
  CHECK(resolve_redirects("http://l.test/c", f, 0).terminated_by == Termination::max_hops);
}

TEST_CASE("the chain deadline covers every hop") {
  MapFetcher f;
  for (int i = 0; i < 20; ++i) f.redirect(fmt::format("http://s.test/{}", i), fmt::format("http://s.test/{}", i + 1));
  auto t = std::chrono::steady_clock::time_point{};
  const SteadyNow clock = [&] {
    t += 4ms;  // every clock read costs 4ms
    return t;
  };
  const auto chain = resolve_redirects("http://s.test/0", f, 50, 30ms, clock);
  CHECK(chain.terminated_by == Termination::timeout);
  CHECK(chain.hop_count() < 20);
}

TEST_CASE("redirect resolution against a live local server") {
  testing::LocalServer srv;
  auto& s = srv.server();
  for (int i = 0; i < 5; ++i)
    s.Get(fmt::format("/c{}", i), [i](const httplib::Request&, httplib::Response& res) {
      res.status = i % 2 ? 302 : 301;
      res.set_header("Location", fmt::format("/c{}", i + 1));
    });
  s.Get("/c5", [](const httplib::Request&, httplib::Response& res) { res.set_content("landing", "text/html"); });
  s.Get("/loop", [](const httplib::Request&, httplib::Response& res) {
    res.status = 302;
    res.set_header("Location", "/loop");
  });
  std::string seen_query;
  s.Get("/s/abc", [&](const httplib::Request& req, httplib::Response& res) {
    seen_query = req.get_param_value("utm_source");
    res.status = 301;
    res.set_header("Location", "http://127.0.0.1:" + std::to_string(srv.port()) + "/m");
  });
  s.Get("/m", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"(<html><head><meta http-equiv="refresh" content="0; url=/c5"></head></html>)", "text/html");
  });
  s.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(1500ms);
    res.set_content("late", "text/plain");
  });
  s.Get("/big", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(std::string(200000, 'x'), "text/plain");
  });
  srv.start();
  const auto base = srv.base();

  HttpFetcher http;
  const auto five = resolve_redirects(base + "/c0", http);
  CHECK(five.terminated_by == Termination::final_200);
  CHECK(five.hop_count() == 5);
  CHECK(five.landing_url == base + "/c5");
  CHECK(five.hops[0].status == 301);
  CHECK(five.hops[1].status == 302);

  const auto loop = resolve_redirects(base + "/loop", http, 10);
  CHECK(loop.terminated_by == Termination::max_hops);
  CHECK(loop.hop_count() == 10);

  const auto shortened = resolve_redirects(base + "/s/abc?utm_source=tw", http);
  CHECK(seen_query == "tw");
  CHECK(shortened.terminated_by == Termination::final_200);
  REQUIRE(shortened.hop_count() == 2);
  CHECK(shortened.hops[1].via == HopVia::meta_refresh);
  CHECK(shortened.landing_url == base + "/c5");

  const auto slow = resolve_redirects(base + "/slow", http, 10, 300ms);
  CHECK(slow.terminated_by == Termination::timeout);

  const auto big = http.fetch(base + "/big", 5s);
  CHECK(big.outcome == FetchOutcome::ok);
  CHECK(big.status == 200);
  CHECK(big.body.size() == HttpFetcherOptions{}.max_body_bytes);

  const auto missing = resolve_redirects(base + "/nope", http);
  CHECK(missing.terminated_by == Termination::fetch_error);
  CHECK(missing.final_status == 404);

  srv.stop();
  CHECK(http.fetch(base + "/c5", 1s).outcome != FetchOutcome::ok);
  CHECK(http.fetch("ftp://example.test/", 1s).outcome == FetchOutcome::error);
}

TEST_CASE("recorded fetches replay byte for byte") {
  testing::TempDir dir;
  MapFetcher inner;
  inner.redirect("http://r.test/a", "/b");
  inner.page("http://r.test/b", "<p>hi</p>");
  FetchResponse slow;
  slow.outcome = FetchOutcome::timeout;
  slow.error = "Read";
  inner.responses["http://r.test/slow"] = slow;

  RecordingFetcher rec(inner, Cassette(dir.path()));
  const auto live = resolve_redirects("http://r.test/a", rec);
  CHECK(rec.fetch("http://r.test/slow", 1s).outcome == FetchOutcome::timeout);

  CassetteFetcher replay{Cassette(dir.path())};
  const auto again = resolve_redirects("http://r.test/a", replay);
  CHECK(again.hops == live.hops);
  CHECK(again.landing_url == live.landing_url);
  CHECK(again.terminated_by == live.terminated_by);
  CHECK(replay.fetch("http://r.test/slow", 1s).outcome == FetchOutcome::timeout);

  const auto miss = replay.fetch("http://r.test/unseen", 1s);
  CHECK(miss.outcome == FetchOutcome::error);
  CHECK(miss.error.rfind("CassetteMiss", 0) == 0);

  FetchResponse r;
  r.status = 302;
  r.location = "/x";
  const auto back = fetch_from_json(fetch_to_json(r));
  CHECK(back.status == 302);
  CHECK(back.location == "/x");
  CHECK(back.body.empty());
}

TEST_CASE("polite fetcher spaces requests per host") {
  MapFetcher inner;
  inner.page("http://p.test/1");
  inner.page("http://p.test/2");
  inner.page("http://q.test/1");
  std::vector<std::chrono::milliseconds> waits;
  PoliteFetcher polite(inner, 1000ms, [&](std::chrono::milliseconds d) { waits.push_back(d); });
  polite.fetch("http://p.test/1", 1s);
  polite.fetch("http://q.test/1", 1s);
  polite.fetch("http://p.test/2", 1s);
  REQUIRE(waits.size() == 1);
  CHECK(waits[0] > 900ms);
  CHECK(waits[0] <= 1000ms);
}

TEST_CASE("reputation lookups over HTTP and from a cassette") {
  testing::LocalServer srv;
  std::string api_key;
  srv.server().Get(R"(/api/v3/urls/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
    api_key = req.get_header_value("x-apikey");
    const std::string id = req.matches[1];
    if (id == base64url("https://bad.test/")) {
      res.set_content(R"({"data":{"attributes":{"last_analysis_stats":{"malicious":5,"suspicious":2,"harmless":60}}}})",
                      "application/json");
    } else if (id == base64url("https://broken.test/")) {
      res.set_content(R"({"data":{}})", "application/json");
    } else {
      res.status = 404;
      res.set_content(R"({"error":{"code":"NotFoundError"}})", "application/json");
    }
  });
  srv.start();
  testing::TempDir dir;
  HttpEndpoint ep{srv.base(), "k-123", 5s};
  VirusTotalClient recorder(JsonService(ServiceMode::record, Cassette(dir.path()), ep));
  CHECK(reputation_lookup("HTTPS://Bad.test:443#frag", recorder) == ReputationCounts{5, 2, true});
  CHECK(api_key == "k-123");
  CHECK(recorder.lookup("https://clean.test/") == ReputationCounts{0, 0, false});
  CHECK(error_code([&] { recorder.lookup("https://broken.test/"); }) == Errc::service_unavailable);
  srv.stop();

  VirusTotalClient replay(JsonService(ServiceMode::replay, Cassette(dir.path()), std::nullopt));
  CHECK(replay.lookup("https://bad.test/") == ReputationCounts{5, 2, true});
  CHECK_FALSE(replay.lookup("https://clean.test/").scanned);
  CHECK(error_code([&] { replay.lookup("https://other.test/"); }) == Errc::cassette_miss);
}

TEST_CASE("audit joins chains and reputation back onto tweets") {
  MapFetcher f;
  f.redirect("https://BIT.test/x", "https://land.test/offer");  // fetched as first written
  f.page("https://land.test/offer");
  f.page("https://safe.test/");
  f.redirect("http://loop.test/", "http://loop.test/");
  MapReputation rep;
  rep.table["https://bit.test/x"] = {0, 1, true};
  rep.table["https://land.test/offer"] = {4, 1, true};
  rep.table["https://safe.test/"] = {0, 0, true};
  rep.table["http://loop.test/"] = {2, 1, true};

  auto a = testing::tweet("a");
  a.embedded_urls = {"https://BIT.test/x", "https://safe.test/", "https://bit.test/x#top"};
  auto b = testing::tweet("b");
  b.embedded_urls = {"https://safe.test"};
  auto c = testing::tweet("c");
  auto d = testing::tweet("d");
  d.embedded_urls = {"http://loop.test/"};

  UrlAuditOptions opt;
  opt.workers = 3;
  opt.max_hops = 4;
  const auto result = audit_urls({a, b, c, d}, f, rep, opt);
  CHECK(result.by_url.size() == 3);
  CHECK(f.calls.at("https://BIT.test/x") == 1);
  CHECK(f.calls.count("https://bit.test/x#top") == 0);
  CHECK(f.calls.at("https://safe.test/") == 1);

  const auto& entry = result.by_url.at("https://bit.test/x");
  CHECK(entry.chain.landing_url == "https://land.test/offer");
  CHECK(entry.embedded == ReputationCounts{0, 1, true});
  CHECK(entry.landing == ReputationCounts{4, 1, true});
  CHECK(result.by_url.at("http://loop.test/").chain.terminated_by == Termination::max_hops);

  REQUIRE(result.verdicts.size() == 4);
  CHECK(result.verdicts[0].tweet_id == "a");
  CHECK(result.verdicts[0].score == 5);
  CHECK(result.verdicts[0].problematic);
  CHECK(result.verdicts[0].per_url.size() == 3);
  CHECK(result.verdicts[1].score == 0);
  CHECK(result.verdicts[2].per_url.empty());
  CHECK(result.verdicts[3].score == 3);
  CHECK(result.verdicts[3].problematic);
}

TEST_CASE("audit propagates reputation service failures") {
  class Failing final : public ReputationClient {
   public:
    ReputationCounts lookup(const std::string&) override { fail(Errc::quota_exceeded, "quota"); }
  } failing;
  MapFetcher f;
  f.page("https://x.test/");
  auto t = testing::tweet("t");
  t.embedded_urls = {"https://x.test/"};
  CHECK(error_code([&] { audit_urls({t}, f, failing); }) == Errc::quota_exceeded);
}

TEST_CASE("risk datasets split adult and other ads") {
  std::vector<corpus::TweetRecord> records{testing::tweet("1", "Twitter Ads", "2022-10-03T01:00:00Z"),
                                           testing::tweet("2", "Twitter Ads", "2022-10-03T23:00:00Z"),
                                           testing::tweet("3", "Twitter Ads", "2022-10-04T05:00:00Z"),
                                           testing::tweet("4", "Twitter Ads", "2022-10-04T06:00:00Z")};
  std::vector<UrlVerdict> verdicts{score_tweet_urls("1", {{3, 0, 0, 0}}), score_tweet_urls("2", {{0, 0, 2, 2}}),
                                   score_tweet_urls("3", {}), score_tweet_urls("4", {{1, 0, 0, 0}})};
  std::vector<explicitness::ExplicitScore> scores{{"1", 0.9, false, ""}, {"2", 0.2, false, ""}, {"3", 0.95, false, ""}};
  const auto d = url_risk_datasets(records, verdicts, scores, 0.5);
  REQUIRE(d.daily.size() == 2);
  CHECK(d.daily[0].ads_total == 2);
  CHECK(d.daily[0].problematic == 2);
  CHECK(d.daily[1].fraction == 0.0);
  CHECK(mean_daily_fraction(d.daily) == Catch::Approx(0.5));
  CHECK(d.unscored == 1);
  CHECK(d.adult.ads == 2);
  CHECK(d.adult.with_urls == 1);
  CHECK(d.adult.problematic == 1);
  CHECK(d.adult.problematic_embedded == 1);
  CHECK(d.other.problematic == 1);
  CHECK(d.other.benign_embedded_unsafe_landing == 1);
  CHECK(d.scatter.size() == 2);
  CHECK(d.adult.problematic == d.adult.problematic_embedded + d.adult.benign_embedded_unsafe_landing);
}
