#include "adaudit/common/cassette.hpp"

#include <fstream>
#include <sstream>

#include "adaudit/common/error.hpp"
#include "adaudit/common/hash.hpp"

namespace adaudit {

Cassette::Cassette(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string Cassette::entry_name(std::string_view key) { return sha256_hex(key) + ".json"; }

std::optional<nlohmann::json> Cassette::find(std::string_view key) const {
  const auto path = dir_ / entry_name(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  auto entry = nlohmann::json::parse(ss.str(), nullptr, false);
  if (entry.is_discarded() || !entry.contains("response")) fail(Errc::io, "corrupt cassette entry " + path.string());
  if (entry.value("key", std::string{}) != key) return std::nullopt;
  return entry["response"];
}

void Cassette::put(std::string_view key, const nlohmann::json& response) const {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / entry_name(key);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write " + tmp.string());
    nlohmann::json entry = {{"key", std::string(key)}, {"response", response}};
    out << entry.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace adaudit
