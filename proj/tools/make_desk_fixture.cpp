// make_desk_fixture: writes a deterministic desk-scale corpus, its service
// cassettes and a matching config into one directory.
//
//   make_desk_fixture OUT_DIR [--seed N]
//
// OUT_DIR/config.json              pipeline config in replay mode
// OUT_DIR/input/*.jsonl|csv|txt    stream, rehydration capture, labels, FP list, lexicon
// OUT_DIR/cassettes/<service>/     recorded service replies
// OUT_DIR/expected.json            what was planted (topics, templates, FPs)

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adaudit/clusterlab/embedding.hpp"
#include "adaudit/common/cassette.hpp"
#include "adaudit/common/csv.hpp"
#include "adaudit/common/url.hpp"
#include "adaudit/corpus/tweet.hpp"
#include "adaudit/explicitness/calibration.hpp"
#include "adaudit/urlaudit/fetchers.hpp"
#include "adaudit/urlaudit/redirects.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adaudit;
using namespace std::chrono_literals;

namespace {

constexpr int kAds = 2000;
constexpr int kUnscorable = 2;  // ads whose scorer reply is missing from the cassette
constexpr int kNonAds = 800;
constexpr int kAuthors = 240;
constexpr int kTemplateAuthors = 16;
constexpr int kUrlPool = 360;
constexpr int kDays = 28;
constexpr int kPerBin = 50;
constexpr std::uint64_t kCalibrationSeed = 7;
constexpr const char* kModel = "distiluse-base-multilingual-cased-v2";
constexpr const char* kAttribute = "SEXUALLY_EXPLICIT";

// Ads per 0.1-wide score bin, and how many of the 50 sampled per bin are adult.
constexpr std::array<int, 10> kBinSizes{900, 250, 150, 120, 100, 100, 90, 100, 100, 90};
constexpr std::array<int, 10> kBinPositives{0, 0, 1, 25, 25, 50, 50, 50, 50, 50};

const std::vector<std::string> kLexicon{
    "hot",   "singles", "near",  "you",   "tonight", "meet",   "chat",  "now",   "free",   "click",
    "see",   "private", "photos", "date",  "lonely",  "girls",  "wait",  "for",   "your",   "message",
    "join",  "today",   "live",  "cam",   "show",    "sexy",   "local", "women", "looking", "fun",
    "no",    "signup",  "just",  "real",  "profiles", "online", "video", "call",  "secret", "club"};

const std::vector<std::string> kFirst{"Jane", "Mila", "Anna", "Lucy", "Nina", "Sara", "Emma", "Olga",
                                      "Rosa", "Tina", "Vera", "Lena", "Kate", "Dana", "Ivy",  "Zoe"};
const std::vector<std::string> kLast{"Doe", "Smith", "Brown", "Stone", "Hart", "Moss", "Lane", "Wood",
                                     "Reed", "Fox",  "Gray",  "Cole",  "Ross", "Ward", "Bell", "Hale"};

struct Topic {
  std::string name;
  std::vector<std::string> phrases;
};

const std::vector<Topic> kTopics{
    {"dating", {"Meet verified singles in your city", "Your perfect match is one swipe away", "Flirt and date tonight"}},
    {"webcam", {"Live cam shows all night", "Private webcam rooms open now", "Watch live models streaming"}},
    {"adult_shop", {"Discreet adult toys shipped fast", "Lingerie sale with free shipping", "Intimate products discount"}},
    {"supplements", {"Boost stamina with natural pills", "Male enhancement formula on sale", "Performance capsules trial"}},
    {"escort", {"Companions available in your area", "Book a private meeting now", "Exclusive VIP companionship"}},
    {"template", {}},
};

const std::vector<std::string> kBenign{"New sneakers drop this weekend", "Save on cloud storage plans",
                                       "Learn Python in 30 days", "Fresh coffee delivered daily",
                                       "Book your summer flights early", "Upgrade your phone today",
                                       "Home insurance made simple", "Try our meal kits free"};

const std::vector<std::pair<std::string, double>> kLangs{{"en", 0.55}, {"es", 0.12}, {"ja", 0.1}, {"pt", 0.08},
                                                         {"de", 0.06}, {"fr", 0.05}, {"und", 0.04}};

struct Author {
  std::string id;
  std::string username;
  std::optional<Timestamp> created;
  std::uint64_t followers = 0;
  std::uint64_t following = 0;
};

struct Planted {
  corpus::TweetRecord record;
  double score = 0.0;
  int bin = 0;
  int topic = -1;  // index into kTopics, -1 for benign
  bool removed = false;
  bool false_positive = false;
  bool scorable = true;
};

Timestamp at(Date day, std::chrono::milliseconds offset) { return Timestamp(day) + offset; }

std::string pick_lang(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  for (const auto& [lang, p] : kLangs) {
    if (x < p) return lang;
    x -= p;
  }
  return "en";
}

/// In-memory fetcher over the planted responses, used to derive landing URLs.
class MapFetcher final : public urlaudit::IsolatedFetcher {
 public:
  explicit MapFetcher(const std::map<std::string, urlaudit::FetchResponse>& pages) : pages_(pages) {}
  urlaudit::FetchResponse fetch(const std::string& url, std::chrono::milliseconds) override {
    const auto it = pages_.find(url);
    if (it != pages_.end()) return it->second;
    urlaudit::FetchResponse r;
    r.outcome = urlaudit::FetchOutcome::error;
    r.error = "not planted: " + url;
    return r;
  }

 private:
  const std::map<std::string, urlaudit::FetchResponse>& pages_;
};

urlaudit::FetchResponse page(int status, std::optional<std::string> location = {}, std::string body = {}) {
  urlaudit::FetchResponse r;
  r.status = status;
  r.location = std::move(location);
  r.body = std::move(body);
  return r;
}

json reputation_reply(int malicious, int suspicious) {
  return json{{"status", 200},
              {"body", {{"data", {{"attributes", {{"last_analysis_stats", {{"malicious", malicious}, {"suspicious", suspicious}, {"harmless", 60}, {"undetected", 10}}}}}}}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the desk-scale fixture"};
  std::string out_arg;
  std::uint64_t seed = 20221001;
  app.add_option("out", out_arg, "Output directory")->required();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const fs::path out = out_arg;
  fs::remove_all(out);
  for (const char* d : {"input", "cassettes/explicit", "cassettes/translate", "cassettes/embed", "cassettes/fetch",
                        "cassettes/reputation"})
    fs::create_directories(out / d);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Date start = *parse_date("2022-10-03");  // a Monday

  std::vector<Author> authors;
  for (int i = 0; i < kAuthors; ++i) {
    Author a;
    a.id = fmt::format("{}", 900000 + i);
    if (i < kTemplateAuthors)
      a.username = kFirst[static_cast<std::size_t>(i)] + kLast[static_cast<std::size_t>((i * 5) % 16)];
    else
      a.username = fmt::format("brand_{:03d}", i);
    if (i % 17 != 5) {
      // A third of the accounts appear after collection starts.
      a.created = i % 3 == 0 ? at(start + std::chrono::days{i % 20}, std::chrono::hours{i % 24})
                             : at(*parse_date("2015-01-01") + std::chrono::days{(i * 37) % 2500}, 0ms);
    }
    a.followers = static_cast<std::uint64_t>(unit(rng) * 5000);
    a.following = static_cast<std::uint64_t>(unit(rng) * 800);
    authors.push_back(a);
  }

  // URL pool: the fetch pages and the URL each ad embeds.
  std::map<std::string, urlaudit::FetchResponse> pages;
  std::vector<std::string> pool;
  for (int u = 0; u < kUrlPool; ++u) {
    const std::string ok_body = "<html><body>offer</body></html>";
    switch (u % 10) {
      case 6: {  // shortener
        const std::string s = fmt::format("https://bit.ly/s{}", u), land = fmt::format("https://land{}.example.net/offer?c={}", u, u);
        pages[s] = page(301, land);
        pages[land] = page(200, std::nullopt, ok_body);
        pool.push_back(s);
        break;
      }
      case 7: {  // two 3xx hops, then a meta refresh
        const std::string a = fmt::format("https://t.example/r{}", u), b = fmt::format("https://track{}.example/c", u);
        const std::string c = fmt::format("https://track{}.example/go?x=1", u), d = fmt::format("https://final{}.example/", u);
        pages[a] = page(302, b);
        pages[b] = page(302, std::string("/go?x=1"));
        pages[c] = page(200, std::nullopt,
                        fmt::format("<html><head><meta http-equiv=\"refresh\" content=\"0; url={}\"></head></html>", d));
        pages[d] = page(200, std::nullopt, ok_body);
        pool.push_back(a);
        break;
      }
      case 8: {
        const std::string a = fmt::format("https://slow{}.example/", u);
        urlaudit::FetchResponse r;
        r.outcome = urlaudit::FetchOutcome::timeout;
        r.error = "connection timed out";
        pages[a] = r;
        pool.push_back(a);
        break;
      }
      case 9: {  // redirect loop
        const std::string a = fmt::format("https://loop{}.example/a", u), b = fmt::format("https://loop{}.example/b", u);
        pages[a] = page(302, b);
        pages[b] = page(302, a);
        pool.push_back(a);
        break;
      }
      default: {
        const std::string a = fmt::format("https://shop{}.example.com/p?id={}&utm_source=tw", u, u);
        pages[a] = page(200, std::nullopt, ok_body);
        pool.push_back(a);
      }
    }
  }

  // Ads: scores fill the bins exactly, topics follow the score.
  std::vector<Planted> ads;
  std::set<std::string> texts;
  const auto unique_text = [&](std::string base) {
    for (int k = 2; !texts.insert(base).second; ++k) base = fmt::format("{} ({})", base.substr(0, base.rfind(" (")), k);
    return base;
  };
  int next_id = 0;
  const auto new_id = [&] { return fmt::format("{}", 1580000000000000000LL + 7919LL * next_id++); };
  std::vector<std::pair<int, double>> score_plan;
  for (int b = 0; b < 10; ++b)
    for (int k = 0; k < kBinSizes[static_cast<std::size_t>(b)]; ++k)
      score_plan.emplace_back(b, std::round((b * 0.1 + 0.005 + 0.09 * unit(rng)) * 1e4) / 1e4);
  std::shuffle(score_plan.begin(), score_plan.end(), rng);
  score_plan.emplace_back(0, 0.0);
  score_plan.emplace_back(0, 0.0);

  std::discrete_distribution<int> topic_pick{22, 18, 16, 14, 12, 18};
  for (int i = 0; i < kAds + kUnscorable; ++i) {
    Planted p;
    p.bin = score_plan[static_cast<std::size_t>(i)].first;
    p.score = score_plan[static_cast<std::size_t>(i)].second;
    p.scorable = i < kAds;
    auto& r = p.record;
    r.tweet_id = new_id();
    const Date day = start + std::chrono::days{static_cast<int>(unit(rng) * kDays)};
    r.created_at = at(day, std::chrono::milliseconds(static_cast<long long>(unit(rng) * 86'399'000)));
    r.captured_at = r.created_at + std::chrono::milliseconds(static_cast<long long>(200 + unit(rng) * 5000));
    r.source = (i % 5 == 0) ? "Twitter for Advertisers" : "Twitter Ads";
    r.lang = pick_lang(rng);
    const bool flagged = p.score >= 0.3 && p.scorable;
    if (flagged) p.topic = topic_pick(rng);
    const Author* author = nullptr;
    if (p.topic == 5) {
      author = &authors[static_cast<std::size_t>(i % kTemplateAuthors)];
      r.lang = "en";
      std::string text = ".";
      for (int w = 0; w < 6; ++w) text += " " + kLexicon[static_cast<std::size_t>(unit(rng) * kLexicon.size())];
      while (!texts.insert(text).second) text += " " + kLexicon[static_cast<std::size_t>(unit(rng) * kLexicon.size())];
      r.text = text;
    } else {
      author = &authors[static_cast<std::size_t>(kTemplateAuthors + static_cast<int>(unit(rng) * (kAuthors - kTemplateAuthors)))];
      const auto& phrases = p.topic >= 0 ? kTopics[static_cast<std::size_t>(p.topic)].phrases : kBenign;
      r.text = unique_text(phrases[static_cast<std::size_t>(unit(rng) * phrases.size())]);
    }
    r.author_id = author->id;
    r.username = author->username;
    r.account_created_at = author->created;
    r.follower_count = author->followers;
    r.following_count = author->following;
    if (unit(rng) < 0.6) r.embedded_urls.push_back(pool[static_cast<std::size_t>(unit(rng) * pool.size())]);
    if (unit(rng) < 0.05) r.embedded_urls.push_back(pool[static_cast<std::size_t>(unit(rng) * pool.size())]);
    r.media_kinds.push_back(unit(rng) < 0.5 ? corpus::MediaKind::image : corpus::MediaKind::video);
    // Violating ads are removed more often than the rest; template ads slip through.
    p.removed = p.topic == 5 ? false : unit(rng) < (flagged ? 0.55 : 0.22);
    p.false_positive = flagged && p.topic != 5 && unit(rng) < 0.05;
    ads.push_back(std::move(p));
  }

  // Stream: ads interleaved with ordinary tweets, a few broken lines and one repeat.
  {
    std::ofstream stream(out / "input/stream.jsonl", std::ios::binary);
    std::ofstream rehydrated(out / "input/rehydrated.jsonl", std::ios::binary);
    std::size_t a = 0;
    for (int n = 0; n < kNonAds || a < ads.size(); ++n) {
      if (n < kNonAds) {
        corpus::TweetRecord t;
        t.tweet_id = new_id();
        const auto& who = authors[static_cast<std::size_t>(n % kAuthors)];
        t.author_id = who.id;
        t.username = who.username;
        t.created_at = at(start + std::chrono::days{n % kDays}, std::chrono::minutes{n % 1440});
        t.captured_at = t.created_at + 1s;
        t.lang = "en";
        t.text = fmt::format("just a regular tweet #{}", n);
        t.source = n % 2 ? "Twitter for iPhone" : "Twitter Web App";
        stream << corpus::serialize_tweet(t) << '\n';
        if (n % 4 == 0) {
          t.captured_at += std::chrono::days{15};
          rehydrated << corpus::serialize_tweet(t) << '\n';
        }
      }
      for (int k = 0; k < 3 && a < ads.size(); ++k, ++a) {
        stream << corpus::serialize_tweet(ads[a].record) << '\n';
        if (a == 10) stream << corpus::serialize_tweet(ads[a].record) << '\n';
        if (!ads[a].removed) {
          auto later = ads[a].record;
          later.captured_at += std::chrono::days{15};
          later.follower_count += 10;
          rehydrated << corpus::serialize_tweet(later) << '\n';
        }
      }
      if (n == 100) stream << "{\"tweet_id\": \"truncated\n";
      if (n == 200) stream << "{\"author_id\": \"1\", \"text\": \"no id\"}\n";
      if (n == 300) stream << "\n";
    }
  }

  // Services.
  const Cassette explicit_c(out / "cassettes/explicit"), translate_c(out / "cassettes/translate"),
      embed_c(out / "cassettes/embed"), fetch_c(out / "cassettes/fetch"), rep_c(out / "cassettes/reputation");
  std::vector<Eigen::VectorXd> centers;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t t = 0; t < kTopics.size(); ++t) {
    Eigen::VectorXd c(clusterlab::kRawEmbeddingDim);
    for (auto& v : c) v = gauss(rng);
    centers.push_back(c.normalized());
  }
  json expected_topics = json::object();
  for (const auto& p : ads) {
    const auto& r = p.record;
    std::string scored = r.text;
    if (r.lang != "en") {
      scored = "[" + r.lang + "->en] " + r.text;
      translate_c.put("translate:" + r.lang + ":en:" + r.text,
                      json{{"status", 200}, {"body", {{"data", {{"translations", {{{"translatedText", scored}}}}}}}}});
    }
    if (p.scorable)
      explicit_c.put(std::string("explicit:") + kAttribute + ":" + scored,
                     json{{"status", 200}, {"body", {{"attributeScores", {{kAttribute, {{"summaryScore", {{"value", p.score}, {"type", "PROBABILITY"}}}}}}}}}});
    if (p.topic >= 0) {
      expected_topics[r.tweet_id] = kTopics[static_cast<std::size_t>(p.topic)].name;
      Eigen::VectorXd v = centers[static_cast<std::size_t>(p.topic)];
      for (auto& x : v) x += 0.012 * gauss(rng);
      std::vector<double> rounded;
      for (double x : v) rounded.push_back(std::round(x * 1e6) / 1e6);
      embed_c.put(std::string("embed:") + kModel + ":" + r.text, json{{"status", 200}, {"body", {{"vector", rounded}}}});
    }
  }

  MapFetcher map_fetcher(pages);
  std::set<std::string> reputation_urls;
  for (const auto& [url, response] : pages) fetch_c.put("fetch:" + url, urlaudit::fetch_to_json(response));
  for (const auto& url : pool) {
    const auto chain = urlaudit::resolve_redirects(url, map_fetcher, 10, 30s);
    reputation_urls.insert(canonicalize_url(url));
    reputation_urls.insert(canonicalize_url(chain.landing_url));
  }
  for (const auto& url : reputation_urls) {
    const double x = unit(rng);
    if (x < 0.08) {
      rep_c.put(url, json{{"status", 404}, {"body", {{"error", {{"code", "NotFoundError"}}}}}});
      continue;
    }
    // Mostly clean, with a tail of engines flagging adult or scam pages.
    const int mal = x < 0.55 ? 0 : static_cast<int>(unit(rng) * 5);
    const int sus = x < 0.45 ? 0 : static_cast<int>(unit(rng) * 3);
    rep_c.put(url, reputation_reply(mal, sus));
  }

  // Calibration labels for the stratified sample the pipeline will draw.
  std::vector<explicitness::ExplicitScore> scores;
  std::map<std::string, int> bin_of;
  for (const auto& p : ads)
    if (p.scorable) {
      scores.push_back({p.record.tweet_id, p.score, false, {}});
      bin_of[p.record.tweet_id] = p.bin;
    }
  const auto sample = explicitness::stratified_sample(scores, kPerBin, 0.1, kCalibrationSeed);
  std::map<int, std::vector<std::string>> sampled_by_bin;
  for (const auto& id : sample) sampled_by_bin[bin_of.at(id)].push_back(id);
  {
    CsvWriter csv(out / "input/calibration_labels.csv");
    csv.row({"tweet_id", "label"});
    for (auto& [bin, ids] : sampled_by_bin) {
      std::sort(ids.begin(), ids.end());
      for (std::size_t k = 0; k < ids.size(); ++k)
        csv.row({ids[k], static_cast<int>(k) < kBinPositives[static_cast<std::size_t>(bin)] ? "1" : "0"});
    }
  }

  json fps = json::array();
  {
    std::ofstream f(out / "input/false_positives.txt");
    f << "# ads flagged by the scorer that annotators judged not adult\n";
    for (const auto& p : ads)
      if (p.false_positive) {
        f << p.record.tweet_id << '\n';
        fps.push_back(p.record.tweet_id);
      }
  }
  {
    std::ofstream f(out / "input/lexicon.txt");
    f << "# words seen in templated adult ads\n";
    for (const auto& w : kLexicon) f << w << '\n';
  }

  json templates = json::array(), camel = json::array();
  std::size_t removed = 0;
  for (const auto& p : ads) {
    if (p.removed) ++removed;
    if (p.topic == 5) templates.push_back(p.record.tweet_id);
  }
  for (int i = 0; i < kTemplateAuthors; ++i) camel.push_back(authors[static_cast<std::size_t>(i)].id);
  std::ofstream(out / "expected.json") << json{{"ads", ads.size()},
                                               {"ads_removed", removed},
                                               {"template_ads", templates},
                                               {"camelcase_authors", camel},
                                               {"false_positives", fps},
                                               {"topics", expected_topics},
                                               {"calibration_threshold", 0.3}}
                                              .dump(2)
                                       << '\n';

  const json config{
      {"inputs",
       {{"stream", "input/stream.jsonl"},
        {"rehydrated", "input/rehydrated.jsonl"},
        {"calibration_labels", "input/calibration_labels.csv"},
        {"false_positives", "input/false_positives.txt"},
        {"lexicon", "input/lexicon.txt"}}},
      {"moderation",
       {{"rehydration_window", "14d"}, {"strict_window", true}, {"collection_start", "2022-10-03T00:00:00Z"},
        {"late_removed_ads", 12}}},
      {"explicit", {{"threshold", 0.3}, {"per_bin", kPerBin}, {"bin_width", 0.1}, {"seed", kCalibrationSeed}}},
      {"cluster",
       {{"dbcv_floor", 0.1}, {"reduce_dim", 128}, {"reduction_seed", 11}, {"similarity_floor", 0.5},
        {"community_seed", 13}, {"blind_sample_size", 100}, {"blind_seed", 17}, {"workers", 2}}},
      {"urls", {{"threshold", 3}, {"max_hops", 10}, {"timeout", "30s"}, {"workers", 2}}},
      {"annotation", {{"annotators", {"a1", "a2", "a3", "a4"}}, {"seed", 19}, {"adult_sample", 200}}},
      {"services", {{"mode", "replay"}, {"cassette_dir", "cassettes"}, {"embedding", {{"model", kModel}}}}}};
  std::ofstream(out / "config.json") << config.dump(2) << '\n';

  std::cout << fmt::format("wrote {} ads ({} removed), {} urls, {} pages to {}\n", ads.size(), removed, pool.size(),
                           pages.size(), out.string());
  return 0;
}
