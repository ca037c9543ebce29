#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace adaudit {

/// Absolute http(s) URL split into components. Query and fragment are kept
/// verbatim: campaign parameters must reach the fetcher untouched.
struct Url {
  std::string scheme;  // lowercase
  std::string host;    // as written (may include userinfo-free IPv6 brackets)
  std::optional<int> port;
  std::string path;     // "" or starts with '/'
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  std::string str() const;
  /// scheme://host[:port] with the port omitted when default
  std::string origin() const;
};

std::optional<Url> parse_url(std::string_view text);

/// True for absolute URLs with scheme http or https and a non-empty host.
bool is_valid_http_url(std::string_view text);

/// RFC 3986 reference resolution; returns nullopt if the result is not a valid http(s) URL.
std::optional<std::string> resolve_reference(std::string_view base, std::string_view reference);

/// Lowercases scheme and host, drops default ports and the fragment, turns an
/// empty path into "/". The query string is preserved byte for byte.
std::string canonicalize_url(std::string_view text);

}  // namespace adaudit
