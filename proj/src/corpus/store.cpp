#include "adaudit/corpus/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adaudit/common/error.hpp"
#include "adaudit/common/hash.hpp"
#include "adaudit/corpus/parse.hpp"

namespace adaudit::corpus {

CorpusStore::CorpusStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "snapshots");
  load();
}

std::string CorpusStore::file_name_for(const std::string& label) {
  const bool plain = !label.empty() && std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
  return (plain ? label : "label-" + sha256_hex(label).substr(0, 16)) + ".jsonl";
}

void CorpusStore::load() {
  const auto index_path = root_ / "index.json";
  if (!std::filesystem::exists(index_path)) return;
  std::ifstream in(index_path);
  const auto index = nlohmann::json::parse(in, nullptr, false);
  if (index.is_discarded()) fail(Errc::io, "corrupt store index " + index_path.string());
  for (const auto& entry : index.at("snapshots")) {
    Snapshot snap;
    const auto label = entry.at("label").get<std::string>();
    snap.file = entry.at("file").get<std::string>();
    snap.finalized = entry.at("finalized").get<bool>();
    std::ifstream data(root_ / "snapshots" / snap.file);
    std::string line;
    while (std::getline(data, line)) {
      if (line.empty()) continue;
      snap.keys.insert(parse_tweet(line).tweet_id);
    }
    labels_.push_back(label);
    snapshots_.emplace(label, std::move(snap));
  }
}

void CorpusStore::write_index() const {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& label : labels_) {
    const auto& s = snapshots_.at(label);
    snaps.push_back({{"label", label}, {"file", s.file}, {"count", s.keys.size()}, {"finalized", s.finalized}});
  }
  const nlohmann::json index = {{"format", 1}, {"snapshots", snaps}};
  const auto tmp = root_ / "index.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << index.dump(2) << '\n';
    if (!out) fail(Errc::io, "cannot write store index");
  }
  std::filesystem::rename(tmp, root_ / "index.json");
}

WriteReceipt CorpusStore::store_snapshot(const std::string& label, const std::vector<TweetRecord>& records) {
  auto it = snapshots_.find(label);
  if (it == snapshots_.end()) {
    labels_.push_back(label);
    it = snapshots_.emplace(label, Snapshot{file_name_for(label), {}, false}).first;
  }
  Snapshot& snap = it->second;
  if (snap.finalized) fail(Errc::snapshot_finalized, label);

  WriteReceipt receipt;
  std::ofstream out(root_ / "snapshots" / snap.file, std::ios::app | std::ios::binary);
  if (!out) fail(Errc::io, "cannot append to snapshot " + label);
  for (const auto& r : records) {
    if (!snap.keys.insert(r.tweet_id).second) {
      ++receipt.duplicates;
      continue;
    }
    out << serialize_tweet(r) << '\n';
    ++receipt.written;
  }
  out.flush();
  if (!out) fail(Errc::io, "write failed for snapshot " + label);
  write_index();
  return receipt;
}

void CorpusStore::finalize(const std::string& label) {
  auto it = snapshots_.find(label);
  if (it == snapshots_.end()) {
    labels_.push_back(label);
    it = snapshots_.emplace(label, Snapshot{file_name_for(label), {}, false}).first;
  }
  it->second.finalized = true;
  write_index();
}

bool CorpusStore::is_finalized(const std::string& label) const {
  auto it = snapshots_.find(label);
  return it != snapshots_.end() && it->second.finalized;
}

std::size_t CorpusStore::size(const std::string& label) const {
  auto it = snapshots_.find(label);
  return it == snapshots_.end() ? 0 : it->second.keys.size();
}

std::vector<TweetRecord> CorpusStore::read_snapshot(const std::string& label) const {
  auto it = snapshots_.find(label);
  if (it == snapshots_.end()) return {};
  std::ifstream in(root_ / "snapshots" / it->second.file);
  auto parsed = parse_tweet_stream(in, Strictness::strict);
  std::sort(parsed.records.begin(), parsed.records.end(), [](const TweetRecord& a, const TweetRecord& b) {
    return a.captured_at != b.captured_at ? a.captured_at < b.captured_at : a.tweet_id < b.tweet_id;
  });
  return parsed.records;
}

}  // namespace adaudit::corpus
