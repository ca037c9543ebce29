// Acceptance runner: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria (0 = all pass).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iterator>
#include <numeric>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "adaudit/annotate/agreement.hpp"
#include "adaudit/clusterlab/dbcv.hpp"
#include "adaudit/clusterlab/grid.hpp"
#include "adaudit/clusterlab/selection.hpp"
#include "adaudit/clusterlab/template_pattern.hpp"
#include "adaudit/explicitness/calibration.hpp"
#include "adaudit/explicitness/disparity.hpp"
#include "adaudit/report/summary.hpp"
#include "adaudit/urlaudit/fetchers.hpp"
#include "adaudit/urlaudit/redirects.hpp"
#include "adaudit/urlaudit/scoring.hpp"
#include "desk.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "support.hpp"
// httplib drags in resolv.h, whose macros collide with Eigen; keep it last.
#include "local_server.hpp"

using namespace adaudit;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failed sub-checks; the first few messages go into the detail.
class Checker {
 public:
  void check(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    ++failed_;
    if (failed_ <= 3) failures_ += (failures_.empty() ? "" : "; ") + what;
  }
  Outcome done(const std::string& summary) const {
    if (failed_ == 0) return {true, summary};
    return {false, fmt::format("{} of {} checks failed: {}", failed_, total_, failures_)};
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::string failures_;
};

Outcome url_score_oracle() {
  Checker c;
  int cases = 0;
  for (int me = 0; me <= 5; ++me)
    for (int se = 0; se <= 5; ++se)
      for (int ml = 0; ml <= 5; ++ml)
        for (int sl = 0; sl <= 5; ++sl) {
          ++cases;
          const int got = urlaudit::problematic_score({me, se, ml, sl});
          c.check(got == oracle::problematic_score(me, se, ml, sl), fmt::format("({},{},{},{})", me, se, ml, sl));
        }
  c.check(cases == 1296, "case count");
  return c.done(fmt::format("{} cases exact", cases));
}

Outcome compliance() {
  Checker c;
  const auto s = report::compliance_summary(fixtures::published_counts());
  const auto pct = [](const report::Ratio& r) { return 100.0 * r.value; };
  c.check(s.violating_unmoderated == 4873, "4991-118");
  c.check(s.violating_total == 13256, "8383+4873");
  c.check(s.moderated_fraction.numerator == 8383 && s.moderated_fraction.denominator == 13256, "moderated ratio terms");
  c.check(std::abs(pct(s.moderated_fraction) - 63.24) <= 0.01, fmt::format("moderated {:.4f}%", pct(s.moderated_fraction)));
  c.check(s.violating_fraction.numerator == 13374 && s.violating_fraction.denominator == 34606, "violating ratio terms");
  c.check(std::abs(pct(s.violating_fraction) - 38.64) <= 0.01, fmt::format("violating {:.4f}%", pct(s.violating_fraction)));
  c.check(s.removed_total == 10306, "removed total");
  c.check(std::abs(pct(s.removed_adult_fraction) - 81.3) <= 0.1,
          fmt::format("removed adult {:.4f}%", pct(s.removed_adult_fraction)));
  return c.done(fmt::format("4873, 13256, {:.2f}%, {:.2f}%, {:.1f}%", pct(s.moderated_fraction),
                            pct(s.violating_fraction), pct(s.removed_adult_fraction)));
}

Outcome language_disparity() {
  Checker c;
  const auto f = fixtures::disparity_fixture();
  const auto rows = explicitness::language_disparity(f.moderated, f.unmoderated);
  const std::map<std::string, double> want{{"ar", 24.06}, {"in", 21.25}, {"ja", 2.84}};
  std::string got;
  c.check(rows.size() == 3, "row count");
  for (const auto& r : rows) {
    const double p = 100.0 * r.moderation_rate;
    got += fmt::format("{} {:.2f}% ", r.lang, p);
    const auto w = want.find(r.lang);
    c.check(w != want.end() && std::abs(p - w->second) <= 0.01, fmt::format("{} {:.4f}%", r.lang, p));
  }
  return c.done(got + "within 0.01pp");
}

std::vector<int> random_labels(std::size_t n, int k, double noise, std::mt19937_64& rng) {
  std::vector<int> labels(n, -1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t next = 0;
  for (int cl = 0; cl < k; ++cl)
    for (int r = 0; r < 2; ++r) labels[order[next++]] = cl;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (; next < n; ++next) labels[order[next]] = u(rng) < noise ? -1 : static_cast<int>(rng() % static_cast<unsigned>(k));
  return labels;
}

Outcome dbcv() {
  Checker c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 5 + rng() % 8;
    const std::size_t dim = 1 + rng() % 3;
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    clusterlab::RowMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pts[i][j] = coord(rng);
    const int k = 2 + static_cast<int>(rng() % std::min<std::size_t>(2, n / 2 - 1));
    const auto labels = random_labels(n, k, 0.2, rng);
    const double diff = std::abs(clusterlab::dbcv_score_points(m, labels) - oracle::dbcv(pts, labels));
    worst = std::max(worst, diff);
    c.check(diff <= 1e-9, fmt::format("instance {} differs by {:.3g}", instance, diff));
  }
  std::mt19937_64 rng2(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 6 + rng2() % 20;
    const int dim = 1 + static_cast<int>(rng2() % 4);
    clusterlab::RowMatrix<double> pts(static_cast<Eigen::Index>(n), dim);
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (Eigen::Index j = 0; j < dim; ++j) pts(i, j) = g(rng2) + static_cast<double>(i % 3) * 2.0;
    const auto labels = random_labels(n, 2 + static_cast<int>(rng2() % 2), 0.3, rng2);
    const double s = clusterlab::dbcv_score_points(pts, labels);
    c.check(s >= -1.0 && s <= 1.0, fmt::format("labeling {} scored {}", t, s));
  }
  const auto blobs = fixtures::two_blobs(30, 3, 10.0, 0.5, 5);
  const double two = clusterlab::dbcv_score_points(blobs.points, blobs.truth);
  auto shuffled = blobs.truth;
  std::mt19937_64 rng3(6);
  std::shuffle(shuffled.begin(), shuffled.end(), rng3);
  const double mixed = clusterlab::dbcv_score_points(blobs.points, shuffled);
  c.check(two > 0.8, fmt::format("two blobs {:.3f}", two));
  c.check(mixed < 0.0, fmt::format("shuffled {:.3f}", mixed));
  return c.done(fmt::format("oracle max diff {:.1e}, 1000 labelings in range, blobs {:.3f}, shuffled {:.3f}", worst,
                            two, mixed));
}

clusterlab::ClusterRun fake_run(int clusters, int noise, double dbcv, clusterlab::ClusterParams params) {
  clusterlab::ClusterRun r;
  r.params = params;
  r.n_clusters = clusters;
  r.n_noise = noise;
  r.dbcv = dbcv;
  r.survived = dbcv >= clusterlab::kDefaultDbcvFloor;
  return r;
}

Outcome cluster_selection() {
  Checker c;
  std::mt19937_64 rng(77);
  const auto grid = clusterlab::make_grid();
  int tables = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<clusterlab::ClusterRun> runs;
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i)
      runs.push_back(fake_run(static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
                              0.05 * static_cast<double>(rng() % 5), grid[rng() % grid.size()]));
    const std::size_t expect = oracle::select_best(runs, clusterlab::kDefaultDbcvFloor);
    if (expect == runs.size()) {
      const auto code = testing::error_code([&] { clusterlab::select_best_run(runs); });
      c.check(code == Errc::no_surviving_runs, fmt::format("table {} should have no survivor", t));
      continue;
    }
    ++tables;
    const auto chosen = clusterlab::select_best_run(runs).params;
    c.check(chosen == runs[expect].params, fmt::format("table {} disagrees with the rule", t));
    for (int p = 0; p < 5; ++p) {
      std::shuffle(runs.begin(), runs.end(), rng);
      c.check(clusterlab::select_best_run(runs).params == chosen, fmt::format("table {} not permutation invariant", t));
    }
  }
  const auto blobs = fixtures::two_blobs(40, 3, 12.0, 0.5, 3);
  clusterlab::GridBounds bounds;
  bounds.min_cluster_size_lo = 10;
  bounds.min_samples_lo = 5;
  const auto result = clusterlab::grid_search_clusters(blobs.points, clusterlab::make_grid(bounds),
                                                       clusterlab::kDefaultDbcvFloor, 2);
  std::size_t surviving = 0;
  for (const auto& run : result.runs) {
    if (!run.survived) continue;
    ++surviving;
    c.check(run.n_clusters == 2 && fixtures::recovers(run.labels, blobs.truth), "surviving run misses the planted split");
  }
  c.check(surviving > 0, "no surviving grid runs");
  return c.done(fmt::format("200 tables ({} with survivors) match the rule under shuffling; {} surviving grid runs recover 2 blobs",
                            tables, surviving));
}

Outcome calibration() {
  Checker c;
  const auto clean = fixtures::noisy_calibration(0.0);
  const auto clean_report = explicitness::calibrate_threshold(clean.scores, clean.labels);
  const auto f1_at = [&](double t) {
    for (const auto& cand : clean_report.threshold_candidates)
      if (std::abs(cand.threshold - t) < 1e-12) return cand.f1;
    return -1.0;
  };
  c.check(f1_at(0.3) == 1.0, fmt::format("noise-free f1(0.3) = {}", f1_at(0.3)));
  c.check(clean_report.chosen_threshold == 0.3, "noise-free choice");
  const auto noisy = fixtures::noisy_calibration(0.05);
  const double chosen = explicitness::calibrate_threshold(noisy.scores, noisy.labels).chosen_threshold;
  c.check(chosen == 0.3, fmt::format("5% noise chose {}", chosen));
  return c.done(fmt::format("noise-free f1(0.3)=1, 5% noise selects {}", chosen));
}

Outcome fleiss() {
  Checker c;
  std::mt19937_64 rng(31);
  double worst = 0.0;
  int degenerate = 0;
  for (int t = 0; t < 100; ++t) {
    const int items = 2 + static_cast<int>(rng() % 20);
    const int cats = 2 + static_cast<int>(rng() % 4);
    const int raters = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(items), std::vector<int>(static_cast<std::size_t>(cats), 0));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(items, cats);
    for (int i = 0; i < items; ++i)
      for (int r = 0; r < raters; ++r) {
        const int k = rng() % 3 == 0 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(cats));
        ++rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        m(i, k) += 1.0;
      }
    if ((m.colwise().sum().array() > 0).count() == 1) {
      ++degenerate;
      bool undefined = false;
      try {
        annotate::fleiss_kappa(m);
      } catch (const Error& e) {
        undefined = e.code() == Errc::kappa_undefined;
      }
      c.check(undefined, fmt::format("instance {} uses one category but kappa was defined", t));
      continue;
    }
    const double diff = std::abs(annotate::fleiss_kappa(m) - oracle::fleiss_kappa(rows));
    worst = std::max(worst, diff);
    c.check(diff <= 1e-12, fmt::format("instance {} differs by {:.3g}", t, diff));
  }
  const auto unanimous = annotate::agreement_report({{"adult", "adult", "adult"}, {"not_adult", "not_adult", "not_adult"}});
  c.check(unanimous.percent_agreement == 1.0 && std::abs(unanimous.fleiss_kappa - 1.0) < 1e-12,
          fmt::format("unanimous gave ({}, {})", unanimous.percent_agreement, unanimous.fleiss_kappa));
  Eigen::MatrixXd anti(2, 2);
  anti << 1, 1, 1, 1;
  const double k_anti = annotate::fleiss_kappa(anti);
  c.check(std::abs(k_anti + 1.0) < 1e-12, fmt::format("anti-agreement gave {}", k_anti));
  return c.done(fmt::format("oracle max diff {:.1e} ({} single-category draws undefined), unanimous (1, 1), anti-agreement {}",
                            worst, degenerate, k_anti));
}

Outcome redirects() {
  Checker c;
  testing::LocalServer srv;
  auto& s = srv.server();
  for (int i = 0; i < 5; ++i)
    s.Get(fmt::format("/hop{}", i), [i](const httplib::Request&, httplib::Response& res) {
      res.status = 301 + i % 2;
      res.set_header("Location", fmt::format("/hop{}", i + 1));
    });
  s.Get("/hop5", [](const httplib::Request&, httplib::Response& res) { res.set_content("<html>landing</html>", "text/html"); });
  s.Get("/loop-a", [](const httplib::Request&, httplib::Response& res) {
    res.status = 302;
    res.set_header("Location", "/loop-b");
  });
  s.Get("/loop-b", [](const httplib::Request&, httplib::Response& res) {
    res.status = 302;
    res.set_header("Location", "/loop-a");
  });
  s.Get("/s/Ab3x", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 301;
    res.set_header("Location", srv.base() + "/offer?utm_source=ad");
  });
  s.Get("/offer", [](const httplib::Request&, httplib::Response& res) { res.set_content("offer", "text/html"); });
  srv.start();

  urlaudit::HttpFetcher http;
  const auto run = [&] {
    return std::vector<urlaudit::RedirectChain>{urlaudit::resolve_redirects(srv.base() + "/hop0", http, 10, 5s),
                                                urlaudit::resolve_redirects(srv.base() + "/loop-a", http, 10, 5s),
                                                urlaudit::resolve_redirects(srv.base() + "/s/Ab3x", http, 10, 5s)};
  };
  const auto first = run();
  const auto second = run();
  srv.stop();

  const auto& chain = first[0];
  c.check(chain.hop_count() == 5, fmt::format("5-hop chain gave {} hops", chain.hop_count()));
  c.check(chain.landing_url == srv.base() + "/hop5", "5-hop landing " + chain.landing_url);
  c.check(chain.terminated_by == urlaudit::Termination::final_200, "5-hop termination");
  c.check(first[1].terminated_by == urlaudit::Termination::max_hops && first[1].hop_count() == 10,
          fmt::format("loop ended by {} after {} hops", to_string(first[1].terminated_by), first[1].hop_count()));
  c.check(first[2].landing_url != first[2].embedded_url && first[2].landing_url == srv.base() + "/offer?utm_source=ad",
          "shortener landing " + first[2].landing_url);
  for (std::size_t i = 0; i < first.size(); ++i)
    c.check(first[i].hops == second[i].hops && first[i].landing_url == second[i].landing_url,
            fmt::format("chain {} differs between runs", i));
  return c.done("5 hops to /hop5, loop stops at 10 hops, shortener lands elsewhere, repeatable");
}

Outcome url_sensitivity() {
  Checker c;
  const auto verdicts = fixtures::sensitivity_verdicts();
  std::size_t prev = verdicts.size();
  for (int t = 1; t <= 10; ++t) {
    const auto n = urlaudit::count_problematic(verdicts, t);
    c.check(n <= prev, fmt::format("count rises at threshold {}", t));
    prev = n;
  }
  const auto at3 = urlaudit::count_problematic(verdicts, 3);
  const auto at7 = urlaudit::count_problematic(verdicts, 7);
  const double drop = 100.0 * static_cast<double>(at3 - at7) / static_cast<double>(at3);
  c.check(drop <= 11.0, fmt::format("drop {:.2f}%", drop));
  return c.done(fmt::format("monotone; {} at 3, {} at 7, drop {:.2f}%", at3, at7, drop));
}

Outcome template_detector() {
  Checker c;
  const auto f = fixtures::template_fixture();
  const auto m = clusterlab::detect_template_pattern(f.ads, f.lexicon);
  std::size_t tp = 0;
  for (const auto& id : m.text_matches) tp += f.planted_text.count(id);
  const double precision = m.text_matches.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.text_matches.size());
  const double recall = static_cast<double>(tp) / static_cast<double>(f.planted_text.size());
  c.check(f.ads.size() == 200 && f.planted_text.size() == 128, "fixture shape");
  c.check(precision == 1.0, fmt::format("precision {}", precision));
  c.check(recall == 1.0, fmt::format("recall {}", recall));
  c.check(m.camelcase_usernames == f.planted_camel, "CamelCase flags differ from plants");
  return c.done(fmt::format("precision {}, recall {}, {} CamelCase flags exact", precision, recall,
                            m.camelcase_usernames.size()));
}

/// Hashes of every stage output, leaving out receipts (they carry wall-clock
/// completion times).
std::map<std::string, std::string> output_hashes(const fs::path& workdir) {
  auto all = desk::tree_hashes(workdir / "runs");
  std::erase_if(all, [](const auto& kv) { return fs::path(kv.first).filename() == "receipt.json"; });
  return all;
}

Outcome end_to_end() {
  Checker c;
  testing::TempDir dir;
  desk::generate(dir / "fixture");
  const auto run = [&](const std::string& workdir) {
    const std::string cmd = fmt::format("\"{}\" full-run --config \"{}\" --workdir \"{}\" > \"{}\" 2>&1",
                                        ADAUDIT_AUDIT_TOOL, (dir / "fixture" / "config.json").string(),
                                        (dir / workdir).string(), (dir / (workdir + ".log")).string());
    return std::system(cmd.c_str());
  };
  const int rc_a = run("work-a");
  const int rc_b = run("work-b");
  c.check(rc_a == 0, fmt::format("first full-run exited {}", rc_a));
  c.check(rc_b == 0, fmt::format("second full-run exited {}", rc_b));
  const auto a = output_hashes(dir / "work-a");
  const auto b = output_hashes(dir / "work-b");
  std::set<std::string> stages;
  for (const auto& [rel, hash] : a) stages.insert(std::next(fs::path(rel).begin())->string());  // <run_id>/<stage>/...
  c.check(stages.size() == 8, fmt::format("{} stage directories", stages.size()));
  c.check(!a.empty() && a == b, "outputs differ between runs");
  return c.done(fmt::format("8 stages twice, {} output files byte-identical", a.size()));
}

struct Criterion {
  std::string name;
  std::chrono::milliseconds budget;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"url-score-oracle", 1s, url_score_oracle},
      {"compliance-arithmetic", 1s, compliance},
      {"language-disparity", 1s, language_disparity},
      {"dbcv", 30s, dbcv},
      {"cluster-selection", 60s, cluster_selection},
      {"threshold-calibration", 10s, calibration},
      {"fleiss-kappa", 10s, fleiss},
      {"redirect-resolution", 10s, redirects},
      {"url-threshold-sensitivity", 1s, url_sensitivity},
      {"template-detector", 1s, template_detector},
      {"end-to-end-smoke", 300s, end_to_end},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const auto took = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (out.pass && took > crit.budget) {
      out.pass = false;
      out.detail += fmt::format("; over the {} ms budget", crit.budget.count());
    }
    failed += out.pass ? 0 : 1;
    std::cout << fmt::format("{} {:<26} {:>7} ms  {}\n", out.pass ? "PASS" : "FAIL", crit.name, took.count(), out.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed;
}
