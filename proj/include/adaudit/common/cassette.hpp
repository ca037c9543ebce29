#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace adaudit {

/// Record/replay store for external-service responses.
///
/// Layout: one file per request, `<dir>/<sha256(key)>.json`, holding
/// `{"key": <request key>, "response": <response json>}`. Files are written
/// with sorted keys and two-space indentation so that re-recording the same
/// response yields identical bytes.
class Cassette {
 public:
  explicit Cassette(std::filesystem::path dir);

  std::optional<nlohmann::json> find(std::string_view key) const;
  void put(std::string_view key, const nlohmann::json& response) const;

  const std::filesystem::path& dir() const { return dir_; }
  static std::string entry_name(std::string_view key);

 private:
  std::filesystem::path dir_;
};

}  // namespace adaudit
