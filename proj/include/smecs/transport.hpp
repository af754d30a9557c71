#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace smecs {

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;

  const std::string *header(std::string_view name) const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  // Header names are stored lowercased.
  std::map<std::string, std::string> headers;

  const std::string *header(std::string_view name) const;
};

// All outbound HTTP goes through this interface. Implementations must be
// safe to call from several threads and throw Error(TransportError) when no
// response could be obtained.
class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const HttpRequest &request) = 0;
};

// Replays responses stored on disk. The request path (scheme, host and query
// string removed) maps to files under the fixture root:
//
//   <root>/<path>.json       response body, status 200 unless overridden
//   <root>/<path>.meta.json  optional {"status": 401, "headers": {...}}
//
// A path with neither file answers 404.
class FixtureTransport final : public HttpTransport {
public:
  explicit FixtureTransport(std::filesystem::path root);

  HttpResponse get(const HttpRequest &request) override;

  std::vector<HttpRequest> requests() const;

private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::vector<HttpRequest> requests_;
};

// Live HTTPS client backed by cpp-httplib.
class NetworkTransport final : public HttpTransport {
public:
  explicit NetworkTransport(int timeout_seconds = 30);

  HttpResponse get(const HttpRequest &request) override;

  // Number of NetworkTransport objects ever constructed in this process.
  static long instances();

private:
  int timeout_seconds_;
};

// Removes "https://host" and any query string from a URL.
std::string request_path(std::string_view url);

} // namespace smecs
