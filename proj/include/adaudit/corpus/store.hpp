#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::corpus {

struct WriteReceipt {
  std::size_t written = 0;
  std::size_t duplicates = 0;
};

/// Append-only capture store keyed by (tweet_id, snapshot_label).
///
/// On-disk layout under the root directory:
///
///     index.json                 {"format": 1, "snapshots": [{"label", "file", "count", "finalized"}]}
///     snapshots/<file>.jsonl     one serialized TweetRecord per line, append-only
///
/// Single writer per label. A finalized label rejects further writes.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root);

  WriteReceipt store_snapshot(const std::string& label, const std::vector<TweetRecord>& records);
  void finalize(const std::string& label);

  bool is_finalized(const std::string& label) const;
  /// Labels in creation order.
  const std::vector<std::string>& snapshot_labels() const { return labels_; }
  /// Records sorted by (captured_at, tweet_id).
  std::vector<TweetRecord> read_snapshot(const std::string& label) const;
  std::size_t size(const std::string& label) const;

 private:
  struct Snapshot {
    std::string file;
    std::set<std::string> keys;
    bool finalized = false;
  };

  void load();
  void write_index() const;
  static std::string file_name_for(const std::string& label);

  std::filesystem::path root_;
  std::vector<std::string> labels_;
  std::map<std::string, Snapshot> snapshots_;
};

}  // namespace adaudit::corpus
