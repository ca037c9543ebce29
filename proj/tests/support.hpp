#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include <unistd.h>

#include <fmt/format.h>

#include "adaudit/common/error.hpp"
#include "adaudit/common/time.hpp"
#include "adaudit/corpus/tweet.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("adaudit-test-{}-{}-{}", ::getpid(), counter++, rd());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline adaudit::Timestamp ts(const char* text) { return *adaudit::parse_timestamp(text); }

inline adaudit::corpus::TweetRecord tweet(std::string id, std::string source = "Twitter Ads",
                                          const char* created = "2022-10-03T12:00:00Z") {
  adaudit::corpus::TweetRecord r;
  r.tweet_id = std::move(id);
  r.author_id = "a-" + r.tweet_id;
  r.username = "user_" + r.tweet_id;
  r.created_at = ts(created);
  r.captured_at = r.created_at + std::chrono::seconds{1};
  r.lang = "en";
  r.text = "text of " + r.tweet_id;
  r.source = std::move(source);
  return r;
}

/// Code of the adaudit::Error thrown by `f`, or nullopt if it returned normally.
template <typename F>
std::optional<adaudit::Errc> error_code(F&& f) {
  try {
    f();
  } catch (const adaudit::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing
