#pragma once
// Synthetic fixtures shared by the unit tests and the acceptance runner.

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "adaudit/clusterlab/embedding.hpp"
#include "adaudit/clusterlab/grid.hpp"
#include "adaudit/clusterlab/template_pattern.hpp"
#include "adaudit/corpus/tweet.hpp"
#include "adaudit/explicitness/scoring.hpp"
#include "adaudit/report/summary.hpp"
#include "adaudit/urlaudit/scoring.hpp"

namespace fixtures {

struct Blobs {
  adaudit::clusterlab::RowMatrix<double> points;
  std::vector<int> truth;
};

/// Two isotropic Gaussian blobs in `dim` dimensions, centres `gap` apart.
inline Blobs two_blobs(int per_blob, int dim, double gap, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Blobs b;
  b.points.resize(2 * per_blob, dim);
  for (int i = 0; i < 2 * per_blob; ++i) {
    const int blob = i < per_blob ? 0 : 1;
    for (int d = 0; d < dim; ++d) b.points(i, d) = (d == 0 ? blob * gap : 0.0) + noise(rng);
    b.truth.push_back(blob);
  }
  return b;
}

/// True when the non-noise labels split the points exactly as `truth` does.
inline bool recovers(const std::vector<int>& labels, const std::vector<int>& truth) {
  std::map<int, int> to_truth, from_truth;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    const auto [a, fresh_a] = to_truth.emplace(labels[i], truth[i]);
    const auto [b, fresh_b] = from_truth.emplace(truth[i], labels[i]);
    if (a->second != truth[i] || b->second != labels[i]) return false;
  }
  return to_truth.size() == from_truth.size();
}

inline const std::vector<std::string>& adult_words() {
  static const std::vector<std::string> words{"hot", "singles", "near", "you", "tonight", "meet", "chat", "now",
                                              "free", "sexy", "girls", "cam", "live", "private", "photos", "date",
                                              "lonely", "waiting", "click", "join"};
  return words;
}

struct TemplateFixture {
  adaudit::clusterlab::Lexicon lexicon;
  std::vector<adaudit::corpus::TweetRecord> ads;
  std::set<std::string> planted_text;
  std::set<std::string> planted_camel;
};

/// 200 ads, 128 of them written as ". word word ..." from the lexicon, with
/// near misses among the rest. 100 usernames are FirstLast.
inline TemplateFixture template_fixture(std::uint64_t seed = 42) {
  TemplateFixture f;
  const auto& words = adult_words();
  f.lexicon = adaudit::clusterlab::Lexicon(std::set<std::string>(words.begin(), words.end()));
  std::mt19937_64 rng(seed);
  const auto word = [&] { return words[rng() % words.size()]; };
  const std::vector<std::string> first{"Jane", "Mila", "Anna", "Lucy", "Nina", "Sara", "Emma", "Olga", "Rosa", "Tina"};
  const std::vector<std::string> last{"Doe", "Smith", "Brown", "Stone", "Hart", "Moss", "Lane", "Wood", "Reed", "Fox"};
  const std::vector<std::string> not_camel{"janedoe", "JANEDOE", "Jane_Doe", "JaneDoeX", "AnnaMariaLopez", "J4neDoe",
                                           "jane.doe", "Jane", "JaneD", "deals_hub"};
  const std::vector<std::string> misses{"Normal ad text.",
                                        ".com domains are cheap this week",
                                        ". hot deals on laptops and phones",
                                        "Hot singles near you tonight",
                                        "...",
                                        ". hot",
                                        "Visit . hot singles",
                                        ". hot singles near cheap flights banks"};
  for (int i = 0; i < 200; ++i) {
    adaudit::corpus::TweetRecord r;
    r.tweet_id = fmt::format("t{:03d}", i);
    r.author_id = fmt::format("a{:03d}", i);
    r.source = "Twitter Ads";
    if (i < 128) {
      std::string text = (i % 7 == 0) ? "  ." : ".";
      const int n = 2 + static_cast<int>(rng() % 6);
      for (int k = 0; k < n; ++k) text += " " + word();
      if (i % 5 == 0) text += " " + word() + "!";
      if (i % 11 == 0) {
        // four of five tokens from the lexicon: exactly on the 80% line
        text = ". " + word() + " " + word() + " " + word() + " " + word() + " laptops";
      }
      if (i % 13 == 0) text = ". " + word() + ", " + word() + "... " + word();
      r.text = text;
      f.planted_text.insert(r.tweet_id);
    } else {
      r.text = (i - 128) < static_cast<int>(misses.size()) ? misses[static_cast<std::size_t>(i - 128)]
                                                          : fmt::format("Great offer number {} on shoes", i);
    }
    if (i % 2 == 0) {
      r.username = first[static_cast<std::size_t>(i / 2 % 10)] + last[static_cast<std::size_t>(i / 20 % 10)];
      f.planted_camel.insert(r.tweet_id);
    } else {
      r.username = not_camel[static_cast<std::size_t>(i / 2 % not_camel.size())];
    }
    f.ads.push_back(r);
  }
  return f;
}

/// Verdicts whose problematic count falls by 49 of 451 (10.86%) between
/// thresholds 3 and 7.
inline std::vector<adaudit::urlaudit::UrlVerdict> sensitivity_verdicts() {
  std::vector<adaudit::urlaudit::UrlVerdict> out;
  std::mt19937_64 rng(8);
  const auto add = [&](int score, int n) {
    for (int i = 0; i < n; ++i) {
      adaudit::urlaudit::UrlCounts c;
      // Split the score across embedded and landing so both sides are exercised.
      if (rng() % 2) {
        c.mal_e = score / 2;
        c.sus_e = score - score / 2;
        c.mal_l = static_cast<int>(rng() % static_cast<unsigned>(score + 1));
      } else {
        c.mal_l = score - score / 3;
        c.sus_l = score / 3;
        c.sus_e = static_cast<int>(rng() % static_cast<unsigned>(score + 1));
      }
      out.push_back(adaudit::urlaudit::score_tweet_urls(fmt::format("v{}", out.size()), {c}));
    }
  };
  add(0, 900);
  add(1, 250);
  add(2, 120);
  add(3, 20);
  add(4, 15);
  add(5, 8);
  add(6, 6);
  add(7, 60);
  add(9, 170);
  add(12, 172);
  return out;
}

struct LabeledScores {
  std::vector<adaudit::explicitness::ExplicitScore> scores;
  std::map<std::string, bool> labels;
};

/// Uniform scores labeled positive iff score >= 0.3, then each label flipped
/// with probability `noise`.
inline LabeledScores noisy_calibration(double noise, std::size_t n = 2000, std::uint64_t seed = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledScores out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = fmt::format("c{}", i);
    const double score = std::round(u(rng) * 1e6) / 1e6;
    out.scores.push_back({id, score, false, {}});
    const bool truth = score >= 0.3;
    out.labels[id] = u(rng) < noise ? !truth : truth;
  }
  return out;
}

struct DisparityFixture {
  std::vector<adaudit::corpus::TweetRecord> moderated;
  std::vector<adaudit::corpus::TweetRecord> unmoderated;
};

/// Per-language moderated/unmoderated adult ads: ja 5/176, in 136/640, ar 250/1039.
inline DisparityFixture disparity_fixture() {
  DisparityFixture f;
  const auto add = [](std::vector<adaudit::corpus::TweetRecord>& into, const std::string& lang, int n, const char* tag) {
    for (int i = 0; i < n; ++i) {
      adaudit::corpus::TweetRecord r;
      r.tweet_id = fmt::format("{}-{}-{}", lang, tag, i);
      r.lang = lang;
      r.source = "Twitter Ads";
      into.push_back(r);
    }
  };
  add(f.moderated, "ja", 5, "m");
  add(f.unmoderated, "ja", 171, "u");
  add(f.moderated, "in", 136, "m");
  add(f.unmoderated, "in", 504, "u");
  add(f.moderated, "ar", 250, "m");
  add(f.unmoderated, "ar", 789, "u");
  return f;
}

/// Counts published for the full corpus.
inline adaudit::report::ComplianceCounts published_counts() {
  adaudit::report::ComplianceCounts c;
  c.total_ads = 34606;
  c.rehydrated_ads = 24530;
  c.removed_diff = 10076;
  c.late_removed = 230;
  c.flagged_total = 13374;
  c.fp_total = 314;
  c.flagged_retained = 4991;
  c.fp_retained = 118;
  c.violating_moderated = 8383;
  return c;
}

}  // namespace fixtures
