#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "adaudit/report/charts.hpp"
#include "adaudit/report/series.hpp"
#include "adaudit/report/summary.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace adaudit;
using namespace adaudit::report;
using testing::error_code;

TEST_CASE("compliance arithmetic from the published counts") {
  const auto s = compliance_summary(fixtures::published_counts());
  CHECK(s.violating_unmoderated == 4873);
  CHECK(s.violating_total == 13256);
  CHECK(s.removed_total == 10306);
  CHECK(s.flagged_after_fp == 13060);

  CHECK(s.moderated_fraction.numerator == 8383);
  CHECK(s.moderated_fraction.denominator == 13256);
  CHECK(100 * s.moderated_fraction.value == Catch::Approx(63.24).margin(0.01));
  CHECK(s.violating_fraction.numerator == 13374);
  CHECK(s.violating_fraction.denominator == 34606);
  CHECK(100 * s.violating_fraction.value == Catch::Approx(38.64).margin(0.01));
  CHECK(s.removed_adult_fraction.denominator == 10306);
  CHECK(100 * s.removed_adult_fraction.value == Catch::Approx(81.3).margin(0.1));
  CHECK(100 * s.retained_adult_fraction.value == Catch::Approx(20.35).margin(0.01));

  const auto j = to_json(s);
  CHECK(j.at("counts").at("violating_total") == 13256);
  CHECK(j.at("ratios").at("moderated_fraction").at("numerator") == 8383);
}

TEST_CASE("compliance summary rejects inconsistent counts") {
  auto c = fixtures::published_counts();
  c.removed_diff += 1;
  CHECK(error_code([&] { compliance_summary(c); }) == Errc::inconsistent_counts);
  c = fixtures::published_counts();
  c.fp_retained = c.flagged_retained + 1;
  CHECK(error_code([&] { compliance_summary(c); }) == Errc::inconsistent_counts);
  c = fixtures::published_counts();
  c.violating_moderated = c.removed_diff + c.late_removed + 1;
  CHECK(error_code([&] { compliance_summary(c); }) == Errc::inconsistent_counts);
  c = fixtures::published_counts();
  c.late_removed = c.rehydrated_ads + 1;
  CHECK(error_code([&] { compliance_summary(c); }) == Errc::inconsistent_counts);
}

TEST_CASE("compliance identities hold on random consistent counts") {
  std::mt19937_64 rng(3);
  const auto upto = [&](std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng() % (n + 1)); };
  for (int t = 0; t < 500; ++t) {
    ComplianceCounts c;
    c.total_ads = 1 + rng() % 50000;
    c.rehydrated_ads = upto(c.total_ads);
    c.removed_diff = c.total_ads - c.rehydrated_ads;
    c.late_removed = upto(c.rehydrated_ads);
    c.flagged_retained = upto(c.rehydrated_ads);
    c.fp_retained = upto(c.flagged_retained);
    c.violating_moderated = upto(c.removed_diff);
    c.flagged_total = c.flagged_retained + c.violating_moderated;
    c.fp_total = upto(c.flagged_total);
    const auto s = compliance_summary(c);
    REQUIRE(s.violating_total == s.violating_unmoderated + c.violating_moderated);
    REQUIRE(s.removed_total + c.rehydrated_ads == c.total_ads + c.late_removed);
    for (const auto& r : {s.removal_fraction, s.violating_fraction, s.moderated_fraction, s.removed_adult_fraction,
                          s.retained_adult_fraction, s.false_positive_rate}) {
      REQUIRE(r.value >= 0.0);
      REQUIRE(r.value <= 1.0);
      REQUIRE(r.numerator <= r.denominator);
    }
  }
  CHECK(Ratio::of(3, 0).value == 0.0);
}

TEST_CASE("score cdf on a fixed grid") {
  std::mt19937_64 rng(1);
  std::vector<explicitness::ExplicitScore> scores;
  for (int i = 0; i < 500; ++i) scores.push_back({fmt::format("s{}", i), static_cast<double>(rng() % 1001) / 1000.0, false, {}});
  scores.push_back({"edge", 0.3, false, {}});
  const auto cdf = score_cdf(scores, 0.05);
  REQUIRE(cdf.size() == 21);
  CHECK(cdf.front().score == 0.0);
  CHECK(cdf[6].score == 0.3);
  CHECK(cdf.back().score == 1.0);
  CHECK(cdf.back().cumulative_fraction == 1.0);
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    std::size_t brute = 0;
    for (const auto& s : scores) brute += s.score <= cdf[k].score;
    CHECK(cdf[k].at_or_below == brute);
    CHECK(cdf[k].total == scores.size());
    if (k > 0) CHECK(cdf[k].at_or_below >= cdf[k - 1].at_or_below);
  }
  CHECK(score_cdf({}, 0.1).empty());
  CHECK(score_cdf(scores, 0.3).size() == 5);  // 0, 0.3, 0.6, 0.9, 1
  CHECK(error_code([&] { score_cdf(scores, 0.0); }) == Errc::precondition);
}

TEST_CASE("weekday trend counts every day of the window") {
  std::vector<corpus::TweetRecord> records;
  // 2022-10-03 is a Monday. Two weeks, ads only on Mondays and Wednesdays.
  for (int day = 0; day < 14; ++day) {
    if (day % 7 != 0 && day % 7 != 2) continue;
    for (int k = 0; k < 3 + day % 7; ++k) {
      auto r = testing::tweet(fmt::format("d{}k{}", day, k), "Twitter Ads",
                              fmt::format("2022-10-{:02d}T10:00:00Z", 3 + day).c_str());
      r.author_id = fmt::format("adv{}", k % 2);
      records.push_back(r);
    }
  }
  const auto rows = weekday_trend(records, Date{std::chrono::year{2022} / 10 / 3}, Date{std::chrono::year{2022} / 10 / 16});
  CHECK(rows[0].weekday == "Monday");
  CHECK(rows[6].weekday == "Sunday");
  for (const auto& r : rows) CHECK(r.days == 2);
  CHECK(rows[0].ads == 6);
  CHECK(rows[0].mean_ads == 3.0);
  CHECK(rows[0].mean_distinct_advertisers == 2.0);
  CHECK(rows[2].ads == 10);
  CHECK(rows[1].ads == 0);
  CHECK(rows[1].mean_ads == 0.0);

  const auto implicit = weekday_trend(records);  // Monday 3rd to Wednesday 12th
  CHECK(implicit[0].days == 2);
  CHECK(implicit[2].days == 2);
  CHECK(implicit[3].days == 1);
  CHECK(weekday_trend({})[0].days == 0);
}

TEST_CASE("language distribution and daily violating series") {
  std::vector<corpus::TweetRecord> records;
  for (const auto& [lang, n] : std::vector<std::pair<std::string, int>>{{"ja", 2}, {"en", 5}, {"ar", 2}, {"in", 1}})
    for (int i = 0; i < n; ++i) {
      auto r = testing::tweet(lang + std::to_string(i));
      r.lang = lang;
      records.push_back(r);
    }
  const auto langs = language_distribution(records);
  REQUIRE(langs.size() == 4);
  CHECK(langs[0].lang == "en");
  CHECK(langs[1].lang == "ar");
  CHECK(langs[2].lang == "ja");
  CHECK(langs[0].fraction == Catch::Approx(0.5));

  std::vector<moderation::SnapshotPair> pairs;
  for (int i = 0; i < 6; ++i) {
    moderation::SnapshotPair p;
    p.tweet_id = fmt::format("p{}", i);
    p.initial = testing::tweet(p.tweet_id, "Twitter Ads", i < 4 ? "2022-10-03T08:00:00Z" : "2022-10-04T08:00:00Z");
    p.status = i % 2 ? moderation::RehydrationStatus::removed : moderation::RehydrationStatus::retained;
    pairs.push_back(p);
  }
  const auto daily = daily_violating_series(pairs, {"p0", "p1", "p3", "p5"});
  REQUIRE(daily.size() == 2);
  CHECK(daily[0].ads_total == 4);
  CHECK(daily[0].violating == 3);
  CHECK(daily[0].violating_removed == 2);
  CHECK(daily[0].violating_fraction == 0.75);
  CHECK(daily[1].violating == 1);
  CHECK(daily[1].violating_removed == 1);
}

TEST_CASE("charts are standalone svg with escaped labels") {
  const auto line = line_chart_svg({{"a&b", {0, 1, 2}, {1, 3, 2}}}, {"Ads <per> day", "day", "ads"});
  CHECK(line.rfind("<svg", 0) == 0);
  CHECK(line.find("</svg>") != std::string::npos);
  CHECK(line.find("Ads &lt;per&gt; day") != std::string::npos);
  CHECK(line.find("a&amp;b") != std::string::npos);
  CHECK(line.find("<per>") == std::string::npos);

  const auto bars = bar_chart_svg({"en", "ja"}, {3.0, 1.0}, {"langs", "", "count"});
  CHECK(bars.find("<rect") != std::string::npos);
  const auto scatter = scatter_svg({1, 2}, {2, 1}, {0, 1}, {"other", "adult"}, {"urls", "embedded", "landing"});
  CHECK(scatter.find("<circle") != std::string::npos);
  CHECK(line_chart_svg({}, {"empty", "x", "y"}).find("</svg>") != std::string::npos);

  testing::TempDir dir;
  write_text_file(dir / "c.svg", bars);
  std::ifstream in(dir / "c.svg");
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == bars);
}
