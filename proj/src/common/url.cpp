#include "adaudit/common/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace adaudit {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

int default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  const bool absolute = !path.empty() && path.front() == '/';
  if (absolute) pos = 1;
  bool trailing_slash = false;
  while (pos <= path.size()) {
    const std::size_t next = std::min(path.find('/', pos), path.size());
    const std::string_view seg = path.substr(pos, next - pos);
    trailing_slash = false;
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = true;
    } else if (seg == ".") {
      trailing_slash = true;
    } else {
      out.push_back(seg);
    }
    pos = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) result.push_back('/');
    result.append(out[i]);
  }
  if (trailing_slash && (result.empty() || result.back() != '/')) result.push_back('/');
  return result;
}

}  // namespace

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port && *port != default_port(scheme)) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::str() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

std::optional<Url> parse_url(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  Url url;
  url.scheme = lower(text.substr(0, colon));
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  if (text.substr(colon + 1, 2) != "//") return std::nullopt;
  for (char c : text) {
    if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) return std::nullopt;
  }
  std::string_view rest = text.substr(colon + 3);
  const auto auth_end = std::min(rest.find_first_of("/?#"), rest.size());
  std::string_view authority = rest.substr(0, auth_end);
  rest = rest.substr(auth_end);
  if (authority.find('@') != std::string_view::npos) authority = authority.substr(authority.rfind('@') + 1);
  std::string_view host = authority;
  const auto port_sep = authority.rfind(':');
  const bool ipv6 = !authority.empty() && authority.front() == '[';
  if (port_sep != std::string_view::npos && (!ipv6 || authority.find(']') < port_sep)) {
    host = authority.substr(0, port_sep);
    const std::string_view port_text = authority.substr(port_sep + 1);
    if (!port_text.empty()) {
      int port = 0;
      auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
      if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535)
        return std::nullopt;
      url.port = port;
    }
  }
  if (host.empty()) return std::nullopt;
  url.host = std::string(host);
  const auto frag = rest.find('#');
  if (frag != std::string_view::npos) {
    url.fragment = std::string(rest.substr(frag + 1));
    rest = rest.substr(0, frag);
  }
  const auto q = rest.find('?');
  if (q != std::string_view::npos) {
    url.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  url.path = std::string(rest);
  return url;
}

bool is_valid_http_url(std::string_view text) { return parse_url(text).has_value(); }

std::optional<std::string> resolve_reference(std::string_view base_text, std::string_view ref) {
  if (auto absolute = parse_url(ref)) {
    absolute->path = remove_dot_segments(absolute->path);
    return absolute->str();
  }
  const auto scheme_end = ref.find(':');
  const auto first_delim = ref.find_first_of("/?#");
  if (scheme_end != std::string_view::npos && scheme_end < first_delim) return std::nullopt;  // other scheme

  auto base = parse_url(base_text);
  if (!base) return std::nullopt;
  Url target = *base;
  target.fragment.reset();
  if (ref.substr(0, 2) == "//") return resolve_reference(base->scheme + ":" + std::string(ref), base->scheme + ":" + std::string(ref));

  std::string_view rest = ref;
  std::optional<std::string> fragment;
  if (auto f = rest.find('#'); f != std::string_view::npos) {
    fragment = std::string(rest.substr(f + 1));
    rest = rest.substr(0, f);
  }
  std::optional<std::string> query;
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  if (rest.empty()) {
    if (query) target.query = query;
  } else {
    if (rest.front() == '/') {
      target.path = remove_dot_segments(rest);
    } else {
      std::string merged = base->path.empty() ? "/" : base->path.substr(0, base->path.rfind('/') + 1);
      merged.append(rest);
      target.path = remove_dot_segments(merged);
    }
    target.query = query;
  }
  target.fragment = fragment;
  return target.str();
}

std::string canonicalize_url(std::string_view text) {
  auto url = parse_url(text);
  if (!url) return std::string(text);
  url->host = lower(url->host);
  if (url->port && *url->port == default_port(url->scheme)) url->port.reset();
  if (url->path.empty()) url->path = "/";
  url->fragment.reset();
  return url->str();
}

}  // namespace adaudit
