#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace adaudit {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

/// Stable 64-bit value derived from SHA-256; used to seed per-entity RNG streams.
std::uint64_t stable_seed(std::string_view data);

/// RFC 4648 base64url without padding.
std::string base64url(std::string_view data);

}  // namespace adaudit
