#pragma once

// Internal helpers shared by every component that talks HTTP.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "httplib.h"
#include "kgqa/error.h"

namespace kgqa::internal {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

inline SplitUrl split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "URL '" + std::string(url) + "' has no scheme");
  }
  std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported URL scheme '" + std::string(scheme) + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string_view::npos) {
    out.origin = std::string(url);
    out.path = "/";
  } else {
    out.origin = std::string(url.substr(0, path_start));
    out.path = std::string(url.substr(path_start));
  }
  if (out.origin.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "URL '" + std::string(url) + "' has no host");
  }
  return out;
}

inline std::string join_path(std::string_view base, std::string_view suffix) {
  std::string out(base);
  while (!out.empty() && out.back() == '/') out.pop_back();
  out.append(suffix);
  return out;
}

inline std::unique_ptr<httplib::Client> make_client(
    const std::string& origin, std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(origin);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace kgqa::internal
